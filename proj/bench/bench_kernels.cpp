// Timing comparison of the OpenMP kernels against the serial reference
// implementations: dense-stack inference, one training step, KDE evaluation
// and trajectory synthesis + oracle labeling.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ffdg/fleet.hpp"
#include "ffdg/fuel_oracle.hpp"
#include "ffdg/linalg.hpp"
#include "ffdg/nn.hpp"
#include "ffdg/parallel.hpp"
#include "ffdg/ref_kernels.hpp"
#include "ffdg/rng.hpp"
#include "ffdg/sampling.hpp"
#include "ffdg/trajectory.hpp"

using namespace ffdg;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const std::string& name, double ref_ms, double serial_ms, double parallel_ms,
            int threads) {
    std::printf("%-28s %10.2f %12.2f %12.2f (x%d)   speedup vs ref: %.2f\n", name.c_str(),
                ref_ms, serial_ms, parallel_ms, threads, ref_ms / parallel_ms);
}

}  // namespace

int main() {
    const int threads = par::max_threads();
    std::printf("%-28s %10s %12s %12s\n", "kernel", "ref (ms)", "omp@1 (ms)", "omp@n (ms)");

    // --- dense network inference -------------------------------------------
    {
        ModelConfig mc;
        mc.n_blocks = 4;
        mc.width = 64;
        mc.head_width = 4;
        mc.head = HeadVariant::R;
        mc.input_dim = 27;
        ModelState model = init_model(mc, 42);
        Xoshiro256pp rng(1);
        const std::size_t n = 16384;
        Matrix X(n, 27);
        for (double& v : X.data) v = rng.uniform(-2.0, 2.0);
        std::vector<double> cap(n, 3.0);

        std::vector<double> sink;
        const double t_ref = time_best_of(3, [&] { sink = ref::predict(model, X, cap); });
        par::set_max_threads(1);
        const double t1 = time_best_of(3, [&] { sink = predict(model, X, cap); });
        par::set_max_threads(threads);
        const double tn = time_best_of(3, [&] { sink = predict(model, X, cap); });
        report("forward 16k x 4-64-4", t_ref, t1, tn, threads);
    }

    // --- one training step (forward + backward + adam) ----------------------
    {
        ModelConfig mc;
        mc.n_blocks = 4;
        mc.width = 64;
        mc.head_width = 4;
        mc.head = HeadVariant::R;
        mc.input_dim = 27;
        ModelState model = init_model(mc, 42);
        Xoshiro256pp rng(2);
        const std::size_t n = 4096;
        Batch batch;
        batch.X = Matrix(n, 27);
        for (double& v : batch.X.data) v = rng.uniform(-2.0, 2.0);
        batch.y.assign(n, 1.0);
        batch.cap.assign(n, 3.0);
        Workspace ws;
        ParamSet grads = ParamSet::zeros_like(model);
        AdamState opt;
        opt.m = ParamSet::zeros_like(model);
        opt.v = ParamSet::zeros_like(model);

        const auto step = [&] {
            forward(model, batch.X, batch.cap, Mode::train, ws);
            backward(model, ws, batch, LossKind::BetaMAPE, 20.0, grads);
            adam_step(model, grads, opt);
        };
        par::set_max_threads(1);
        const double t1 = time_best_of(3, step);
        par::set_max_threads(threads);
        const double tn = time_best_of(3, step);
        report("train step 4096 rows", t1, t1, tn, threads);
    }

    // --- KDE ---------------------------------------------------------------
    {
        Xoshiro256pp rng(3);
        const std::size_t n = 4000;
        std::vector<std::array<double, 2>> pts(n);
        for (auto& p : pts) p = {rng.normal(), rng.normal()};

        std::vector<double> sink;
        const double t_ref = time_best_of(3, [&] { sink = ref::kde_density(pts, pts); });
        par::set_max_threads(1);
        const double t1 = time_best_of(3, [&] { sink = kde_density(pts, pts); });
        par::set_max_threads(threads);
        const double tn = time_best_of(3, [&] { sink = kde_density(pts, pts); });
        report("kde 4k x 4k", t_ref, t1, tn, threads);
    }

    // --- trajectory synthesis + oracle labels -------------------------------
    {
        const Fleet fleet = synthesize_fleet({.n_train = 4, .n_gen = 0, .seed = 42});
        const int flights = 40;
        std::vector<Trajectory> trajs(static_cast<std::size_t>(flights));

        const auto generate = [&] {
            par::parallel_for(trajs.size(), [&](std::size_t i) {
                trajs[i] = generate_trajectory(fleet.specs[i % fleet.size()],
                                               derive_seed(42, "bench", i));
            });
        };
        const auto generate_ref = [&] {
            for (std::size_t i = 0; i < trajs.size(); ++i)
                trajs[i] = generate_trajectory(fleet.specs[i % fleet.size()],
                                               derive_seed(42, "bench", i));
        };
        const double t_ref = time_best_of(3, generate_ref);
        par::set_max_threads(1);
        const double t1 = time_best_of(3, generate);
        par::set_max_threads(threads);
        const double tn = time_best_of(3, generate);
        report("trajectories x40", t_ref, t1, tn, threads);

        std::vector<double> mass(trajs[0].samples.size(), 0.8 * fleet.specs[0].mtow);
        std::vector<double> sink;
        const double o_ref =
            time_best_of(5, [&] { sink = ref::oracle_labels(trajs[0], fleet.specs[0], mass); });
        std::printf("%-28s %10.2f\n", "oracle labels (1 flight)", o_ref);
    }

    par::set_max_threads(0);
    return 0;
}
