#include <cmath>
#include <cstring>
#include <fstream>

#include "ffdg/errors.hpp"
#include "ffdg/nn.hpp"

namespace ffdg {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'D', 'G', 'C', 'K', '0', '1'};

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw ValidationError("cannot write " + path);
    }
    void bytes(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void f64(double v) { bytes(&v, 8); }
    void f64s(const std::vector<double>& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        bytes(v.data(), v.size() * 8);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct Reader {
    std::ifstream in;
    std::string path;
    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw ValidationError("cannot open " + p);
    }
    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw ValidationError(path + ": truncated checkpoint");
    }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    std::vector<double> f64s() {
        std::vector<double> v(u32());
        bytes(v.data(), v.size() * 8);
        return v;
    }
    std::string str() {
        std::string s(u32(), '\0');
        bytes(s.data(), s.size());
        return s;
    }
};

}  // namespace

void save_checkpoint(const ModelState& state, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 8);
    w.u32(static_cast<std::uint32_t>(state.config.n_blocks));
    w.u32(static_cast<std::uint32_t>(state.config.width));
    w.u32(static_cast<std::uint32_t>(state.config.head_width));
    w.u32(static_cast<std::uint32_t>(state.config.input_dim));
    w.u8(static_cast<std::uint8_t>(state.config.head));
    w.f64(state.config.l2_coeff);

    w.f64s(state.bn_gamma);
    w.f64s(state.bn_beta);
    w.f64s(state.bn_run_mean);
    w.f64s(state.bn_run_var);

    w.u32(static_cast<std::uint32_t>(state.layers.size()));
    for (const DenseLayer& l : state.layers) {
        w.u32(static_cast<std::uint32_t>(l.W.rows));
        w.u32(static_cast<std::uint32_t>(l.W.cols));
        w.bytes(l.W.data.data(), l.W.data.size() * 8);
        w.f64s(l.b);
    }

    const Provenance& p = state.provenance;
    w.u64(p.seed);
    w.u32(static_cast<std::uint32_t>(p.epochs_run));
    w.f64(p.best_val_metric);
    w.str(p.loss);
    w.f64(p.beta);
    w.f64(p.noise_p);
    w.str(p.sampler);
    w.str(p.prng);
    w.str(p.tool_version);

    w.u32(static_cast<std::uint32_t>(state.history.epochs.size()));
    w.u32(static_cast<std::uint32_t>(state.history.best_epoch));
    for (const EpochStats& e : state.history.epochs) {
        w.f64(e.train_loss);
        w.f64(e.val_mape);
        w.f64(e.val_mae);
        w.f64(e.val_me);
        w.f64(e.val_metric);
        w.f64(e.gen_mape);
    }
    w.out.close();
    if (!w.out) throw ValidationError("write failed for " + path);
}

ModelState load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw ValidationError(path + ": not a checkpoint file (bad magic)");

    ModelState state;
    state.config.n_blocks = static_cast<int>(r.u32());
    state.config.width = static_cast<int>(r.u32());
    state.config.head_width = static_cast<int>(r.u32());
    state.config.input_dim = static_cast<int>(r.u32());
    state.config.head = static_cast<HeadVariant>(r.u8());
    state.config.l2_coeff = r.f64();

    state.bn_gamma = r.f64s();
    state.bn_beta = r.f64s();
    state.bn_run_mean = r.f64s();
    state.bn_run_var = r.f64s();

    const std::uint32_t n_layers = r.u32();
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        DenseLayer l;
        const std::uint32_t rows = r.u32();
        const std::uint32_t cols = r.u32();
        l.W = Matrix(rows, cols);
        r.bytes(l.W.data.data(), l.W.data.size() * 8);
        l.b = r.f64s();
        state.layers.push_back(std::move(l));
    }

    Provenance& p = state.provenance;
    p.seed = r.u64();
    p.epochs_run = static_cast<int>(r.u32());
    p.best_val_metric = r.f64();
    p.loss = r.str();
    p.beta = r.f64();
    p.noise_p = r.f64();
    p.sampler = r.str();
    p.prng = r.str();
    p.tool_version = r.str();

    const std::uint32_t n_epochs = r.u32();
    state.history.best_epoch = static_cast<int>(r.u32());
    for (std::uint32_t i = 0; i < n_epochs; ++i) {
        EpochStats e;
        e.train_loss = r.f64();
        e.val_mape = r.f64();
        e.val_mae = r.f64();
        e.val_me = r.f64();
        e.val_metric = r.f64();
        e.gen_mape = r.f64();
        state.history.epochs.push_back(e);
    }
    return state;
}

}  // namespace ffdg
