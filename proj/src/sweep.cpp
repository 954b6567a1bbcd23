#include "rabi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

namespace rabi {

bool row_order(const SweepRow& a, const SweepRow& b) {
    return std::tuple(static_cast<int>(a.method), a.alpha, a.xi1) <
           std::tuple(static_cast<int>(b.method), b.alpha, b.xi1);
}

std::size_t SweepTable::ok_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); }));
}

SweepRow ok_row(const CycleSpec& spec, const CycleResult& r) {
    SweepRow row;
    row.varied = spec.varied;
    row.method = spec.method;
    row.xi1 = spec.xi1;
    row.alpha = spec.alpha;
    row.xi2 = r.xi[1];
    row.xi3 = r.xi[2];
    row.xi4 = r.xi[3];
    row.q_in = r.q_in;
    row.q_out = r.q_out;
    row.w_total = r.w_total;
    row.eta = r.eta;
    row.dsc_flag = r.flags.dsc_threshold;
    return row;
}

SweepRow error_row(const CycleSpec& spec, std::string_view stage, std::string_view kind) {
    SweepRow row;
    row.varied = spec.varied;
    row.method = spec.method;
    row.xi1 = spec.xi1;
    row.alpha = spec.alpha;
    row.status = "error:" + std::string(stage) + ":" + std::string(kind);
    return row;
}

SweepRow evaluate_point(const CycleSpec& spec) {
    try {
        return ok_row(spec, run_cycle(spec));
    } catch (const CycleError& e) {
        return error_row(spec, to_string(e.stage()), to_string(e.kind()));
    } catch (const Error& e) {
        return error_row(spec, "unknown", to_string(e.kind()));
    } catch (const std::exception&) {
        return error_row(spec, "unknown", "internal");
    }
}

SweepTable run_sweep(const SweepConfig& config, const SweepOptions& options) {
    config.validate();
    std::vector<CycleSpec> jobs;
    const auto grid = config.xi1_grid.points();
    for (Method m : config.method_list()) {
        for (double a : config.alphas) {
            for (double x : grid) jobs.push_back(config.cycle_spec(m, x, a));
        }
    }

    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (options.order_seed) {
        std::mt19937_64 rng(*options.order_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    unsigned threads = options.threads ? options.threads : config.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < order.size(); i = next++) {
            const std::size_t j = order[i];
            rows[j] = evaluate_point(jobs[j]);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::stable_sort(rows.begin(), rows.end(), row_order);
    return SweepTable{std::move(rows)};
}

}  // namespace rabi
