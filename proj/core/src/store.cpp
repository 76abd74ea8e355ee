#include "igs/store.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace igs {
namespace {

constexpr char kMagic[4] = {'I', 'G', 'S', 'D'};
constexpr uint16_t kVersion = 1;

// Explicit little-endian encoding keeps the bytes identical across hosts.
void put_u16(std::string& out, uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char(v >> 8));
}
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}
uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }
uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
float get_f32(const uint8_t* p) {
    uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot open for writing: " + tmp);
        f.write(bytes.data(), std::streamsize(bytes.size()));
        if (!f) throw DataError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DataError("rename failed: " + tmp + " -> " + path);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

size_t dtype_size(uint8_t dtype) {
    switch (dtype) {
        case 1: return 4;
        case 2: return 1;
        case 3: return 8;
        default: throw DataError("unknown dtype code " + std::to_string(dtype));
    }
}

}  // namespace

void write_tensor(const std::string& path, const Tensor& t) {
    dtype_size(t.dtype);
    if (t.dims.size() > 255) throw DataError("write_tensor: too many dims");
    size_t n = t.count();
    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kVersion);
    out.push_back(char(t.dtype));
    out.push_back(char(t.dims.size()));
    for (uint32_t d : t.dims) put_u32(out, d);
    switch (t.dtype) {
        case 1:
            if (t.f32.size() != n) throw DataError("write_tensor: payload/dims mismatch");
            for (float v : t.f32) put_f32(out, v);
            break;
        case 2:
            if (t.u8.size() != n) throw DataError("write_tensor: payload/dims mismatch");
            out.append(reinterpret_cast<const char*>(t.u8.data()), t.u8.size());
            break;
        case 3:
            if (t.c64.size() != n) throw DataError("write_tensor: payload/dims mismatch");
            for (const auto& z : t.c64) {
                put_f32(out, z.real());
                put_f32(out, z.imag());
            }
            break;
    }
    atomic_write(path, out);
}

Tensor read_tensor(const std::string& path) {
    std::string raw = slurp(path);
    const uint8_t* p = reinterpret_cast<const uint8_t*>(raw.data());
    if (raw.size() < 8 || std::memcmp(p, kMagic, 4) != 0)
        throw DataError("bad magic in " + path);
    uint16_t ver = get_u16(p + 4);
    if (ver != kVersion)
        throw DataError("unsupported container version " + std::to_string(ver) + " in " + path);
    Tensor t;
    t.dtype = p[6];
    size_t esz = dtype_size(t.dtype);
    size_t ndim = p[7];
    size_t off = 8;
    if (raw.size() < off + 4 * ndim) throw DataError("truncated header in " + path);
    t.dims.resize(ndim);
    for (size_t i = 0; i < ndim; ++i, off += 4) t.dims[i] = get_u32(p + off);
    size_t n = t.count();
    size_t expect = off + n * esz;
    if (raw.size() != expect)
        throw DataError("truncated payload in " + path + ": expected " + std::to_string(expect) +
                        " bytes, got " + std::to_string(raw.size()));
    switch (t.dtype) {
        case 1:
            t.f32.resize(n);
            for (size_t i = 0; i < n; ++i) t.f32[i] = get_f32(p + off + 4 * i);
            break;
        case 2:
            t.u8.assign(p + off, p + off + n);
            break;
        case 3:
            t.c64.resize(n);
            for (size_t i = 0; i < n; ++i)
                t.c64[i] = {get_f32(p + off + 8 * i), get_f32(p + off + 8 * i + 4)};
            break;
    }
    return t;
}

void write_image(const std::string& path, const Image& img) {
    Tensor t;
    t.dtype = 1;
    t.dims = {uint32_t(img.h), uint32_t(img.w)};
    t.f32.assign(img.v.begin(), img.v.end());
    write_tensor(path, t);
}

Image read_image(const std::string& path) {
    Tensor t = read_tensor(path);
    if (t.dtype != 1 || t.dims.size() != 2)
        throw DataError("not a 2-D float image: " + path);
    Image img(int(t.dims[0]), int(t.dims[1]));
    img.v.assign(t.f32.begin(), t.f32.end());
    return img;
}

void write_kspace(const std::string& path, const KSpace& k) {
    Tensor t;
    t.dtype = 3;
    t.dims = {uint32_t(k.h), uint32_t(k.w)};
    t.c64.reserve(k.v.size());
    for (const auto& z : k.v) t.c64.emplace_back(float(z.real()), float(z.imag()));
    write_tensor(path, t);
}

KSpace read_kspace(const std::string& path) {
    Tensor t = read_tensor(path);
    if (t.dtype != 3 || t.dims.size() != 2)
        throw DataError("not a 2-D complex grid: " + path);
    KSpace k(int(t.dims[0]), int(t.dims[1]));
    for (size_t i = 0; i < t.c64.size(); ++i)
        k.v[i] = {double(t.c64[i].real()), double(t.c64[i].imag())};
    return k;
}

void write_pattern(const std::string& path, const SamplingPattern& pat) {
    std::ostringstream out;
    out << "n_lines=" << pat.width << " budget=" << pat.cardinality() << "\n";
    for (int j = 0; j < pat.width; ++j)
        if (pat.selected[j]) out << j << "\n";
    if (!pat.transition_log.empty()) {
        out << "# transition: ";
        for (size_t i = 0; i < pat.transition_log.size(); ++i)
            out << (i ? "," : "") << pat.transition_log[i];
        out << "\n";
    }
    atomic_write(path, out.str());
}

SamplingPattern read_pattern(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError("empty pattern file: " + path);
    int n = -1, budget = -1;
    if (std::sscanf(line.c_str(), "n_lines=%d budget=%d", &n, &budget) != 2 || n < 1 ||
        budget < 0)
        throw DataError("bad pattern header in " + path + ": " + line);
    SamplingPattern pat;
    pat.width = n;
    pat.selected.assign(n, 0);
    int count = 0, prev = -1;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("transition:");
            if (pos != std::string::npos) {
                std::stringstream ss(line.substr(pos + 11));
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (tok.find_first_not_of(" \t") == std::string::npos) continue;
                    pat.transition_log.push_back(std::stoi(tok));
                }
            }
            continue;
        }
        int idx;
        try {
            idx = std::stoi(line);
        } catch (const std::exception&) {
            throw DataError("bad index line in " + path + ": " + line);
        }
        if (idx < 0 || idx >= n)
            throw DataError("index out of range in " + path + ": " + std::to_string(idx));
        if (idx == prev) throw DataError("duplicate index in " + path + ": " + std::to_string(idx));
        if (idx < prev)
            throw DataError("indices not ascending in " + path + ": " + std::to_string(idx));
        if (pat.selected[idx]) throw DataError("duplicate index in " + path);
        pat.selected[idx] = 1;
        prev = idx;
        ++count;
    }
    if (count != budget)
        throw DataError("pattern header/count mismatch in " + path + ": budget " +
                        std::to_string(budget) + ", indices " + std::to_string(count));
    for (int t : pat.transition_log)
        if (t < 0 || t >= n)
            throw DataError("transition index out of range in " + path);
    return pat;
}

void write_pgm(const std::string& path, const Image& img, bool normalize) {
    double lo = 0.0, hi = 1.0;
    if (normalize) {
        lo = img.v[0];
        hi = img.v[0];
        for (double v : img.v) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    std::ostringstream out;
    out << "P5\n" << img.w << " " << img.h << "\n255\n";
    for (double v : img.v) {
        double u;
        if (normalize)
            u = hi > lo ? (v - lo) / (hi - lo) : 0.0;  // constant image -> 0
        else
            u = std::min(1.0, std::max(0.0, v));
        out.put(char(uint8_t(std::floor(u * 255.0 + 0.5))));
    }
    atomic_write(path, out.str());
}

namespace {
std::string kind_name(HeadKind k) {
    switch (k) {
        case HeadKind::IdentityRecon: return "identity";
        case HeadKind::ConvSegmenter: return "segmenter";
        case HeadKind::ConvClassifier: return "classifier";
    }
    throw DataError("unknown head kind");
}
HeadKind kind_from(const std::string& s) {
    if (s == "identity") return HeadKind::IdentityRecon;
    if (s == "segmenter") return HeadKind::ConvSegmenter;
    if (s == "classifier") return HeadKind::ConvClassifier;
    throw DataError("unknown head kind: " + s);
}
}  // namespace

void write_head(const std::string& path, const Head& head) {
    Tensor t;
    t.dtype = 1;
    std::ostringstream meta;
    meta << "kind=" << kind_name(head.kind) << "\n";
    if (head.kind == HeadKind::IdentityRecon) {
        t.dims = {0};
    } else {
        const ConvHeadParams& p = head.p;
        meta << "C=" << p.C << "\nk=" << p.k << "\n";
        meta << "w1=" << p.w1.size() << "\nb1=" << p.b1.size() << "\nw2=" << p.w2.size()
             << "\nb2=1\n";
        t.dims = {uint32_t(p.param_count())};
        t.f32.reserve(p.param_count());
        for (double v : p.w1) t.f32.push_back(float(v));
        for (double v : p.b1) t.f32.push_back(float(v));
        for (double v : p.w2) t.f32.push_back(float(v));
        t.f32.push_back(float(p.b2));
    }
    write_tensor(path, t);
    atomic_write(path + ".meta", meta.str());
}

Head read_head(const std::string& path) {
    std::ifstream mf(path + ".meta");
    if (!mf) throw DataError("cannot open: " + path + ".meta");
    std::string line, kind;
    int C = 0, k = 0;
    while (std::getline(mf, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "kind") kind = val;
        else if (key == "C") C = std::stoi(val);
        else if (key == "k") k = std::stoi(val);
    }
    Head head;
    head.kind = kind_from(kind);
    if (head.kind == HeadKind::IdentityRecon) return head;
    if (C < 1 || k < 1) throw DataError("bad head meta in " + path + ".meta");
    Tensor t = read_tensor(path);
    head.p.C = C;
    head.p.k = k;
    size_t need = size_t(C) * k * k + C + C + 1;
    if (t.dtype != 1 || t.f32.size() != need)
        throw DataError("head parameter count mismatch in " + path + ": expected " +
                        std::to_string(need) + ", got " + std::to_string(t.f32.size()));
    size_t o = 0;
    head.p.w1.assign(t.f32.begin(), t.f32.begin() + C * k * k);
    o = size_t(C) * k * k;
    head.p.b1.assign(t.f32.begin() + o, t.f32.begin() + o + C);
    o += C;
    head.p.w2.assign(t.f32.begin() + o, t.f32.begin() + o + C);
    o += C;
    head.p.b2 = t.f32[o];
    return head;
}

}  // namespace igs
