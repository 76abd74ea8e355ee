// igs: learn and evaluate k-space line-sampling patterns on synthetic phantoms.
//
// Subcommands: phantom-gen, head-train, optimize, eval, compare, render.
// Every command writes a run manifest next to its primary output; re-running
// the argv recorded there reproduces all artifacts byte-identically.
// Exit codes: 0 ok, 2 bad arguments, 3 data error, 4 numeric error.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "igs/grid.hpp"
#include "igs/igs.hpp"
#include "igs/parallel.hpp"
#include "igs/phantom.hpp"
#include "igs/store.hpp"

namespace fs = std::filesystem;
using namespace igs;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------- small helpers ----------

std::string s10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for digest: " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[8192];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= uint8_t(buf[i]);
            h *= 1099511628211ull;
        }
        if (!f) break;
    }
    return h;
}

class Manifest {
  public:
    Manifest(std::string command, std::string argv_line)
        : t0_(std::chrono::steady_clock::now()) {
        lines_.push_back("command=" + command);
        lines_.push_back("version=" + std::string(kToolVersion));
        lines_.push_back("argv=" + argv_line);
    }
    void kv(const std::string& k, const std::string& v) { lines_.push_back(k + "=" + v); }
    void input(const std::string& path) {
        char hex[24];
        std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a_file(path));
        lines_.push_back("input=" + path + " fnv1a=" + hex);
    }
    void output(const std::string& path) { lines_.push_back("output=" + path); }
    void write(const std::string& path) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0_)
                      .count();
        std::ofstream f(path, std::ios::trunc);
        if (!f) throw DataError("cannot write manifest: " + path);
        for (const auto& l : lines_) f << l << "\n";
        f << "duration_ms=" << ms << "\n";
    }

  private:
    std::chrono::steady_clock::time_point t0_;
    std::vector<std::string> lines_;
};

// ---------- dataset directory ----------

struct DataSplit {
    std::vector<Image> img, seg;
    std::vector<int> label;
    size_t size() const { return img.size(); }
};

struct LoadedData {
    DataSplit train, val;
    int size = 0;
};

std::string sample_name(const char* split, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d", split, i);
    return buf;
}

void write_dataset(const std::string& dir, const Dataset& ds, int count, int size, int64_t seed,
                   double lesion_prob, double noise_sigma) {
    fs::create_directories(dir);
    std::ostringstream man;
    man << "count=" << count << "\nsize=" << size << "\nseed=" << seed
        << "\nlesion_prob=" << s10(lesion_prob) << "\nnoise_sigma=" << s10(noise_sigma)
        << "\ntrain=" << ds.train.size() << "\nval=" << ds.val.size() << "\n";
    auto dump = [&](const std::vector<Phantom>& v, const char* split) {
        for (size_t i = 0; i < v.size(); ++i) {
            std::string base = dir + "/" + sample_name(split, int(i));
            write_image(base + ".img", v[i].image);
            write_image(base + ".seg", v[i].seg);
            man << "sample=" << sample_name(split, int(i)) << " split=" << split
                << " seed=" << v[i].seed << " label=" << v[i].label
                << " n_lesions=" << v[i].n_lesions << "\n";
        }
    };
    dump(ds.train, "train");
    dump(ds.val, "val");
    std::ofstream f(dir + "/manifest.txt", std::ios::trunc);
    if (!f) throw DataError("cannot write dataset manifest in " + dir);
    f << man.str();
}

LoadedData read_dataset(const std::string& dir) {
    std::ifstream f(dir + "/manifest.txt");
    if (!f) throw DataError("not a dataset directory (missing manifest.txt): " + dir);
    LoadedData d;
    std::string line;
    while (std::getline(f, line)) {
        if (line.rfind("size=", 0) == 0) d.size = std::stoi(line.substr(5));
        if (line.rfind("sample=", 0) != 0) continue;
        std::istringstream ss(line);
        std::string tok, name, split;
        int label = -1;
        while (ss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
            if (k == "sample") name = v;
            else if (k == "split") split = v;
            else if (k == "label") label = std::stoi(v);
        }
        if (name.empty() || label < 0) throw DataError("bad sample line in " + dir + ": " + line);
        DataSplit& s = split == "val" ? d.val : d.train;
        s.img.push_back(read_image(dir + "/" + name + ".img"));
        s.seg.push_back(read_image(dir + "/" + name + ".seg"));
        s.label.push_back(label);
    }
    if (d.train.size() + d.val.size() == 0) throw DataError("empty data dir: " + dir);
    return d;
}

// ---------- task plumbing ----------

enum class Task { ReconL1, ReconSsim, Seg, Cls };

Task parse_task(const std::string& s) {
    if (s == "recon-l1") return Task::ReconL1;
    if (s == "recon-ssim") return Task::ReconSsim;
    if (s == "seg") return Task::Seg;
    if (s == "cls") return Task::Cls;
    throw UsageError("unknown task: " + s + " (expected recon-l1|recon-ssim|seg|cls)");
}

LossSpec task_loss(Task t) {
    switch (t) {
        case Task::ReconL1: return LossSpec{LossKind::L1, 1.0};
        case Task::ReconSsim: return LossSpec{LossKind::Ssim, 1.0};
        case Task::Seg: return LossSpec{LossKind::Dice, 1.0};
        case Task::Cls: return LossSpec{LossKind::Bce, 1.0};
    }
    throw UsageError("unknown task");
}

bool task_needs_head(Task t) { return t == Task::Seg || t == Task::Cls; }

std::vector<TrainSample> to_samples(const DataSplit& s, Task t) {
    std::vector<TrainSample> out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        TrainSample ts;
        ts.x = s.img[i];
        ts.ygrid = (t == Task::Seg) ? s.seg[i] : s.img[i];
        ts.ypair = {double(s.label[i]), 1.0 - s.label[i]};
        out.push_back(std::move(ts));
    }
    return out;
}

Head load_head_for(Task t, const std::string& path) {
    if (path.empty()) throw UsageError("task requires --head with a trained head file");
    Head h = read_head(path);
    HeadKind want = t == Task::Seg ? HeadKind::ConvSegmenter : HeadKind::ConvClassifier;
    if (h.kind != want) throw DataError("head kind in " + path + " does not match the task");
    return h;
}

// ---------- metric rows ----------

struct SampleMetrics {
    double ssim, psnr, nmse;
    double dice = -1;      // seg only
    int correct = -1;      // cls only
    int label = -1, pred = -1;
};

SampleMetrics eval_sample(const Image& x, const Image& seg, int label,
                          const SamplingPattern& pat, Task task, const Head* head) {
    if (x.w != pat.width) throw DataError("pattern width mismatch: pattern " +
                                          std::to_string(pat.width) + ", image " +
                                          std::to_string(x.w));
    Image xhat = apply_pattern(x, pat);
    SampleMetrics m{};
    m.ssim = ssim_metric(x.v, xhat.v);
    m.psnr = psnr(x.v, xhat.v);
    m.nmse = nmse(x.v, xhat.v);
    if (task == Task::Seg && head) {
        m.dice = dice_score(seg.v, head_forward(*head, xhat));
    } else if (task == Task::Cls && head) {
        auto p = head_forward(*head, xhat);
        m.label = label;
        m.pred = p[0] >= 0.5 ? 1 : 0;
        m.correct = m.pred == label ? 1 : 0;
    }
    return m;
}

// F1 with positive = label 1; degenerate case (no positives anywhere) scores 1.
double f1_from(const std::vector<SampleMetrics>& ms) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& m : ms) {
        if (m.pred == 1 && m.label == 1) ++tp;
        if (m.pred == 1 && m.label == 0) ++fp;
        if (m.pred == 0 && m.label == 1) ++fn;
    }
    double den = 2 * tp + fp + fn;
    return den > 0 ? 2 * tp / den : 1.0;
}

struct MeanRow {
    double ssim = 0, psnr = 0, nmse = 0, dice = 0, f1 = 0, acc = 0;
};

MeanRow mean_of(const std::vector<SampleMetrics>& ms, Task task) {
    MeanRow r;
    for (const auto& m : ms) {
        r.ssim += m.ssim;
        r.psnr += m.psnr;
        r.nmse += m.nmse;
        if (task == Task::Seg) r.dice += m.dice;
        if (task == Task::Cls) r.acc += m.correct;
    }
    double n = double(ms.size());
    r.ssim /= n;
    r.psnr /= n;
    r.nmse /= n;
    r.dice /= n;
    r.acc /= n;
    if (task == Task::Cls) r.f1 = f1_from(ms);
    return r;
}

const char* kCsvHeader = "kind,index,ssim,psnr,nmse,dice,f1,accuracy\n";

void csv_row(std::ostringstream& out, const std::string& kind, const std::string& index,
             const MeanRow& r, Task task) {
    out << kind << "," << index << "," << s10(r.ssim) << "," << s10(r.psnr) << ","
        << s10(r.nmse) << "," << (task == Task::Seg ? s10(r.dice) : "") << ","
        << (task == Task::Cls ? s10(r.f1) : "") << ","
        << (task == Task::Cls ? s10(r.acc) : "") << "\n";
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write: " + path);
    f << body;
}

// Pattern rendered as an n x n image with white sampled columns.
Image pattern_image(const SamplingPattern& pat) {
    Image img(pat.width, pat.width);
    for (int r = 0; r < pat.width; ++r)
        for (int c = 0; c < pat.width; ++c) img.at(r, c) = pat.selected[c] ? 1.0 : 0.0;
    return img;
}

std::string accel_tag(double a) {
    std::string s = s10(a);
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

// ---------- subcommand options ----------

struct PhantomGenOpts {
    std::string out;
    int count = 250, size = 64;
    int64_t seed = 0;
    double lesion_prob = 0.5, noise_sigma = 0.01, train_frac = 0.8, val_frac = 0.2;
};

struct HeadTrainOpts {
    std::string data, kind = "segmenter", loss, out, undersample, init;
    int epochs = 100, batch = 8, patience = 0;
    uint64_t seed = 0;
};

struct OptimizeOpts {
    std::string task, data, head, out, trace;
    double accel = 4.0;
    int batch_limit = 0, jobs = 1;
};

struct EvalOpts {
    std::string pattern, data, task, head, out, split = "val";
    int folds = 0, jobs = 1;
};

struct CompareOpts {
    std::string data, task, head, out, split = "val", sweep;
    std::vector<std::string> patterns, gens;
    double accel = 0;
    uint64_t seed = 0;
    int jobs = 1;
};

struct RenderOpts {
    std::string pattern, data, split = "val", out;
    int index = 0;
    bool seg = false;
};

// ---------- commands ----------

int cmd_phantom_gen(const PhantomGenOpts& o, const std::string& argv_line) {
    Manifest man("phantom-gen", argv_line);
    Dataset ds = gen_dataset(o.count, o.size, o.seed, o.lesion_prob, o.train_frac, o.val_frac,
                             o.noise_sigma);
    write_dataset(o.out, ds, o.count, o.size, o.seed, o.lesion_prob, o.noise_sigma);
    man.kv("seed", std::to_string(o.seed));
    man.output(o.out + "/manifest.txt");
    man.write(o.out + "/run.manifest");
    return 0;
}

int cmd_head_train(const HeadTrainOpts& o, const std::string& argv_line) {
    Manifest man("head-train", argv_line);
    if (o.kind != "segmenter" && o.kind != "classifier")
        throw UsageError("--kind must be segmenter or classifier");
    HeadKind hk = o.kind == "segmenter" ? HeadKind::ConvSegmenter : HeadKind::ConvClassifier;
    std::string loss_name = o.loss.empty() ? (hk == HeadKind::ConvSegmenter ? "dice" : "bce")
                                           : o.loss;
    LossSpec loss;
    if (loss_name == "dice") loss.kind = LossKind::Dice;
    else if (loss_name == "bce") loss.kind = LossKind::Bce;
    else if (loss_name == "l1") loss.kind = LossKind::L1;
    else if (loss_name == "ssim") loss.kind = LossKind::Ssim;
    else throw UsageError("unknown --loss: " + loss_name);

    LoadedData d = read_dataset(o.data);
    man.input(o.data + "/manifest.txt");
    if (d.train.size() == 0) throw DataError("dataset has no training split: " + o.data);
    Task t = hk == HeadKind::ConvSegmenter ? Task::Seg : Task::Cls;
    std::vector<TrainSample> samples = to_samples(d.train, t);
    if (hk == HeadKind::ConvSegmenter && (loss.kind == LossKind::L1 || loss.kind == LossKind::Ssim))
        for (size_t i = 0; i < samples.size(); ++i) samples[i].ygrid = d.train.img[i];

    if (!o.undersample.empty()) {
        SamplingPattern pat = read_pattern(o.undersample);
        man.input(o.undersample);
        for (auto& ts : samples) ts.x = apply_pattern(ts.x, pat);
    }
    Head head;
    if (!o.init.empty()) {
        head = read_head(o.init);
        man.input(o.init);
        if (head.kind != hk) throw DataError("--init head kind does not match --kind");
    } else {
        head = make_head(hk, o.seed);
    }
    TrainResult res = train_head(head, samples, loss, o.epochs, o.batch, o.seed, o.patience);
    write_head(o.out, head);
    std::ostringstream curve;
    curve << "epoch,mean_train_loss\n";
    for (size_t e = 0; e < res.curve.size(); ++e) curve << e << "," << s10(res.curve[e]) << "\n";
    write_text(o.out + ".curve.csv", curve.str());
    man.kv("seed", std::to_string(o.seed));
    man.kv("epochs_run", std::to_string(res.epochs_run));
    man.output(o.out);
    man.output(o.out + ".meta");
    man.output(o.out + ".curve.csv");
    man.write(o.out + ".manifest");
    return 0;
}

int cmd_optimize(const OptimizeOpts& o, const std::string& argv_line) {
    Manifest man("optimize", argv_line);
    Task t = parse_task(o.task);
    if (o.accel < 1) throw UsageError("--accel must be >= 1");
    LoadedData d = read_dataset(o.data);
    man.input(o.data + "/manifest.txt");
    if (d.train.size() == 0) throw DataError("dataset has no training split: " + o.data);
    Head head = task_needs_head(t) ? load_head_for(t, o.head)
                                   : make_head(HeadKind::IdentityRecon, 0);
    if (task_needs_head(t)) man.input(o.head);
    std::vector<TrainSample> samples = to_samples(d.train, t);

    IgsConfig cfg;
    cfg.budget = AccelerationSpec{o.accel}.budget(d.size);
    cfg.loss = task_loss(t);
    cfg.batch_limit = o.batch_limit;
    cfg.jobs = o.jobs;
    auto [pat, trace] = igs_run(samples, head, cfg);
    write_pattern(o.out, pat);
    man.output(o.out);
    if (!o.trace.empty()) {
        std::ostringstream tr;
        tr << "step,line,mean_loss\n";
        tr << "0," << pat.transition_log[0] << ",\n";  // seeded center line
        for (size_t i = 0; i < trace.rows.size(); ++i)
            tr << i + 1 << "," << trace.rows[i].chosen << ","
               << s10(trace.rows[i].mean_loss_before) << "\n";
        tr << "final,," << s10(trace.final_mean_loss) << "\n";
        write_text(o.trace, tr.str());
        man.output(o.trace);
    }
    man.kv("budget", std::to_string(cfg.budget));
    man.write(o.out + ".manifest");
    return 0;
}

int cmd_eval(const EvalOpts& o, const std::string& argv_line) {
    Manifest man("eval", argv_line);
    Task t = parse_task(o.task);
    SamplingPattern pat = read_pattern(o.pattern);
    man.input(o.pattern);
    LoadedData d = read_dataset(o.data);
    man.input(o.data + "/manifest.txt");
    const DataSplit& split = o.split == "train" ? d.train : d.val;
    if (split.size() == 0) throw DataError("requested split is empty: " + o.split);
    Head head;
    bool with_head = task_needs_head(t);
    if (with_head) {
        head = load_head_for(t, o.head);
        man.input(o.head);
    }
    int n = int(split.size());
    std::vector<SampleMetrics> ms(n);
    parallel_for(n, o.jobs, [&](int i) {
        ms[i] = eval_sample(split.img[i], split.seg[i], split.label[i], pat, t,
                            with_head ? &head : nullptr);
    });
    std::ostringstream csv;
    csv << kCsvHeader;
    if (o.folds > 0) {
        auto folds = kfold_partition(n, o.folds);
        std::vector<MeanRow> rows;
        for (size_t f = 0; f < folds.size(); ++f) {
            std::vector<SampleMetrics> sub;
            for (int i : folds[f]) sub.push_back(ms[i]);
            rows.push_back(mean_of(sub, t));
            csv_row(csv, "fold", std::to_string(f), rows.back(), t);
        }
        MeanRow mean{}, sd{};
        for (const auto& r : rows) {
            mean.ssim += r.ssim; mean.psnr += r.psnr; mean.nmse += r.nmse;
            mean.dice += r.dice; mean.f1 += r.f1; mean.acc += r.acc;
        }
        double k = double(rows.size());
        mean.ssim /= k; mean.psnr /= k; mean.nmse /= k;
        mean.dice /= k; mean.f1 /= k; mean.acc /= k;
        for (const auto& r : rows) {
            sd.ssim += (r.ssim - mean.ssim) * (r.ssim - mean.ssim);
            sd.psnr += (r.psnr - mean.psnr) * (r.psnr - mean.psnr);
            sd.nmse += (r.nmse - mean.nmse) * (r.nmse - mean.nmse);
            sd.dice += (r.dice - mean.dice) * (r.dice - mean.dice);
            sd.f1 += (r.f1 - mean.f1) * (r.f1 - mean.f1);
            sd.acc += (r.acc - mean.acc) * (r.acc - mean.acc);
        }
        // population std over the folds
        sd.ssim = std::sqrt(sd.ssim / k); sd.psnr = std::sqrt(sd.psnr / k);
        sd.nmse = std::sqrt(sd.nmse / k); sd.dice = std::sqrt(sd.dice / k);
        sd.f1 = std::sqrt(sd.f1 / k); sd.acc = std::sqrt(sd.acc / k);
        csv_row(csv, "mean", "", mean, t);
        csv_row(csv, "std", "", sd, t);
    } else {
        for (int i = 0; i < n; ++i) {
            MeanRow r;
            r.ssim = ms[i].ssim; r.psnr = ms[i].psnr; r.nmse = ms[i].nmse;
            r.dice = ms[i].dice; r.acc = ms[i].correct;
            csv << "sample," << i << "," << s10(r.ssim) << "," << s10(r.psnr) << ","
                << s10(r.nmse) << "," << (t == Task::Seg ? s10(r.dice) : "") << ",,"
                << (t == Task::Cls ? std::to_string(ms[i].correct) : "") << "\n";
        }
        csv_row(csv, "mean", "", mean_of(ms, t), t);
    }
    write_text(o.out, csv.str());
    man.output(o.out);
    man.write(o.out + ".manifest");
    return 0;
}

int cmd_compare(const CompareOpts& o, const std::string& argv_line) {
    Manifest man("compare", argv_line);
    Task t = parse_task(o.task);
    std::vector<double> accels;
    if (!o.sweep.empty()) {
        std::stringstream ss(o.sweep);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) accels.push_back(std::stod(tok));
        if (accels.empty()) throw UsageError("--accel-sweep lists no accelerations");
        if (!o.patterns.empty())
            throw UsageError("--pattern files cannot be combined with --accel-sweep");
        if (o.gens.empty()) throw UsageError("--accel-sweep needs at least one --gen");
    } else {
        if (o.patterns.size() + o.gens.size() < 2)
            throw UsageError("need at least two of --pattern/--gen, or --accel-sweep");
        if (!o.gens.empty() && o.accel < 1)
            throw UsageError("--gen requires --accel >= 1");
        accels.push_back(o.accel >= 1 ? o.accel : 0);
    }
    for (const auto& g : o.gens)
        if (g != "center" && g != "equispaced" && g != "fastmri" && g != "igs")
            throw UsageError("unknown --gen: " + g + " (center|equispaced|fastmri|igs)");

    LoadedData d = read_dataset(o.data);
    man.input(o.data + "/manifest.txt");
    const DataSplit& split = o.split == "train" ? d.train : d.val;
    if (split.size() == 0) throw DataError("requested split is empty: " + o.split);
    bool with_head = task_needs_head(t);
    Head head;
    if (with_head) {
        head = load_head_for(t, o.head);
        man.input(o.head);
    }
    std::vector<TrainSample> train_samples;
    if (std::find(o.gens.begin(), o.gens.end(), "igs") != o.gens.end())
        train_samples = to_samples(d.train, t);

    std::ostringstream csv;
    csv << "pattern,accel,ssim,psnr,nmse,dice,f1,accuracy\n";
    std::string outdir = fs::path(o.out).parent_path().string();
    if (outdir.empty()) outdir = ".";
    std::string stem = fs::path(o.out).stem().string();

    auto emit = [&](const std::string& name, double accel, const SamplingPattern& pat) {
        int n = int(split.size());
        std::vector<SampleMetrics> ms(n);
        parallel_for(n, o.jobs, [&](int i) {
            ms[i] = eval_sample(split.img[i], split.seg[i], split.label[i], pat, t,
                                with_head ? &head : nullptr);
        });
        MeanRow r = mean_of(ms, t);
        csv << name << "," << s10(accel) << "," << s10(r.ssim) << "," << s10(r.psnr) << ","
            << s10(r.nmse) << "," << (t == Task::Seg ? s10(r.dice) : "") << ","
            << (t == Task::Cls ? s10(r.f1) : "") << ","
            << (t == Task::Cls ? s10(r.acc) : "") << "\n";
        std::string base = outdir + "/" + stem + "_" + name + "_x" + accel_tag(accel);
        write_pgm(base + ".pgm", pattern_image(pat), false);
        write_pgm(base + "_recon.pgm", apply_pattern(split.img[0], pat), false);
        man.output(base + ".pgm");
        man.output(base + "_recon.pgm");
    };

    for (const auto& p : o.patterns) {
        SamplingPattern pat = read_pattern(p);
        man.input(p);
        double accel = double(pat.width) / std::max(1, pat.cardinality());
        emit(fs::path(p).stem().string(), accel, pat);
    }
    for (size_t ai = 0; ai < accels.size(); ++ai) {
        double a = accels[ai];
        int budget = AccelerationSpec{a}.budget(d.size);
        for (const auto& g : o.gens) {
            if (g == "center") {
                emit("center", a, center_pattern(d.size, budget));
            } else if (g == "equispaced") {
                emit("equispaced", a, equispaced_pattern(d.size, budget, 0));
            } else if (g == "fastmri") {
                double frac = fastmri_center_fraction(a, d.size);
                emit("fastmri", a,
                     fastmri_style_pattern(d.size, budget, frac, o.seed + 1000 * ai));
            } else {  // igs
                IgsConfig cfg;
                cfg.budget = budget;
                cfg.loss = task_loss(t);
                cfg.jobs = o.jobs;
                auto [pat, trace] = igs_run(train_samples, head, cfg);
                emit("igs", a, pat);
            }
        }
    }
    write_text(o.out, csv.str());
    man.output(o.out);
    man.kv("seed", std::to_string(o.seed));
    man.write(o.out + ".manifest");
    return 0;
}

int cmd_render(const RenderOpts& o, const std::string& argv_line) {
    Manifest man("render", argv_line);
    if (o.out.empty()) throw UsageError("--out is required");
    if (!o.data.empty()) {
        LoadedData d = read_dataset(o.data);
        man.input(o.data + "/manifest.txt");
        const DataSplit& split = o.split == "train" ? d.train : d.val;
        if (o.index < 0 || size_t(o.index) >= split.size())
            throw DataError("--index out of range for split " + o.split);
        Image img = o.seg ? split.seg[o.index] : split.img[o.index];
        if (!o.pattern.empty()) {
            SamplingPattern pat = read_pattern(o.pattern);
            man.input(o.pattern);
            img = apply_pattern(o.seg ? split.img[o.index] : img, pat);
        }
        write_pgm(o.out, img, false);
    } else if (!o.pattern.empty()) {
        SamplingPattern pat = read_pattern(o.pattern);
        man.input(o.pattern);
        write_pgm(o.out, pattern_image(pat), false);
    } else {
        throw UsageError("render needs --pattern and/or --data");
    }
    man.output(o.out);
    man.write(o.out + ".manifest");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string argv_line;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) argv_line += ' ';
        argv_line += argv[i];
    }

    CLI::App app{"k-space line-sampling pattern optimization and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    PhantomGenOpts pg;
    auto* c_pg = app.add_subcommand("phantom-gen", "generate a synthetic phantom dataset");
    c_pg->add_option("--out", pg.out, "output dataset directory")->required();
    c_pg->add_option("--count", pg.count, "total number of phantoms");
    c_pg->add_option("--size", pg.size, "image side length");
    c_pg->add_option("--seed", pg.seed, "base seed; sample i uses seed+i");
    c_pg->add_option("--lesion-prob", pg.lesion_prob, "probability a phantom carries lesions");
    c_pg->add_option("--noise-sigma", pg.noise_sigma, "additive Gaussian noise sigma");
    c_pg->add_option("--train-frac", pg.train_frac, "fraction of count in the train split");
    c_pg->add_option("--val-frac", pg.val_frac, "fraction of count in the val split");

    HeadTrainOpts ht;
    auto* c_ht = app.add_subcommand("head-train", "train a task head on a dataset");
    c_ht->add_option("--data", ht.data, "dataset directory")->required();
    c_ht->add_option("--kind", ht.kind, "segmenter | classifier");
    c_ht->add_option("--loss", ht.loss, "dice | bce | l1 | ssim (default by kind)");
    c_ht->add_option("--epochs", ht.epochs, "training epochs");
    c_ht->add_option("--batch", ht.batch, "minibatch size");
    c_ht->add_option("--patience", ht.patience, "early stop after this many non-improving epochs");
    c_ht->add_option("--seed", ht.seed, "init + shuffle seed");
    c_ht->add_option("--undersample", ht.undersample, "pattern file; train on undersampled inputs");
    c_ht->add_option("--init", ht.init, "warm-start from this head file");
    c_ht->add_option("--out", ht.out, "output head file")->required();

    OptimizeOpts op;
    auto* c_op = app.add_subcommand("optimize", "run iterative gradient line selection");
    c_op->add_option("--task", op.task, "recon-l1 | recon-ssim | seg | cls")->required();
    c_op->add_option("--data", op.data, "dataset directory")->required();
    c_op->add_option("--accel", op.accel, "acceleration factor; budget = round(N/accel)");
    c_op->add_option("--head", op.head, "trained head file (required for seg/cls)");
    c_op->add_option("--out", op.out, "output pattern file")->required();
    c_op->add_option("--trace", op.trace, "optional per-step trace CSV");
    c_op->add_option("--batch-limit", op.batch_limit, "cap on samples per iteration (0 = all)");
    c_op->add_option("--jobs", op.jobs, "worker threads");

    EvalOpts ev;
    auto* c_ev = app.add_subcommand("eval", "evaluate a pattern on a dataset split");
    c_ev->add_option("--pattern", ev.pattern, "pattern file")->required();
    c_ev->add_option("--data", ev.data, "dataset directory")->required();
    c_ev->add_option("--task", ev.task, "recon-l1 | recon-ssim | seg | cls")->required();
    c_ev->add_option("--head", ev.head, "trained head file (required for seg/cls)");
    c_ev->add_option("--out", ev.out, "output metrics CSV")->required();
    c_ev->add_option("--split", ev.split, "train | val (default val)");
    c_ev->add_option("--folds", ev.folds, "k-fold rows instead of per-sample rows");
    c_ev->add_option("--jobs", ev.jobs, "worker threads");

    CompareOpts cp;
    auto* c_cp = app.add_subcommand("compare", "compare patterns and baseline generators");
    c_cp->add_option("--data", cp.data, "dataset directory")->required();
    c_cp->add_option("--task", cp.task, "recon-l1 | recon-ssim | seg | cls")->required();
    c_cp->add_option("--head", cp.head, "trained head file (required for seg/cls)");
    c_cp->add_option("--out", cp.out, "output comparison CSV")->required();
    c_cp->add_option("--pattern", cp.patterns, "pattern file (repeatable)");
    c_cp->add_option("--gen", cp.gens, "center | equispaced | fastmri | igs (repeatable)");
    c_cp->add_option("--accel", cp.accel, "acceleration for --gen patterns");
    c_cp->add_option("--accel-sweep", cp.sweep, "comma list of accelerations, e.g. 2,4,8,16");
    c_cp->add_option("--split", cp.split, "train | val (default val)");
    c_cp->add_option("--seed", cp.seed, "seed for the fastmri generator");
    c_cp->add_option("--jobs", cp.jobs, "worker threads");

    RenderOpts rd;
    auto* c_rd = app.add_subcommand("render", "render a pattern, sample, or reconstruction");
    c_rd->add_option("--pattern", rd.pattern, "pattern file");
    c_rd->add_option("--data", rd.data, "dataset directory");
    c_rd->add_option("--split", rd.split, "train | val (default val)");
    c_rd->add_option("--index", rd.index, "sample index within the split");
    c_rd->add_flag("--seg", rd.seg, "render the segmentation mask");
    c_rd->add_option("--out", rd.out, "output PGM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_pg->parsed()) return cmd_phantom_gen(pg, argv_line);
        if (c_ht->parsed()) return cmd_head_train(ht, argv_line);
        if (c_op->parsed()) return cmd_optimize(op, argv_line);
        if (c_ev->parsed()) return cmd_eval(ev, argv_line);
        if (c_cp->parsed()) return cmd_compare(cp, argv_line);
        if (c_rd->parsed()) return cmd_render(rd, argv_line);
        std::fprintf(stderr, "no subcommand\n");
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    }
}
