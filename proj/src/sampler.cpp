#include "ising/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ising/exact.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ising {

SamplerMode sampler_mode_from_name(const std::string& name) {
    if (name == "glauber") return SamplerMode::Glauber;
    if (name == "exact-oracle") return SamplerMode::ExactOracle;
    if (name == "shared-chain") return SamplerMode::GlauberSharedChain;
    throw parameter_error("unknown sampler mode: " + name);
}

const char* sampler_mode_name(SamplerMode mode) {
    switch (mode) {
        case SamplerMode::Glauber: return "glauber";
        case SamplerMode::ExactOracle: return "exact-oracle";
        case SamplerMode::GlauberSharedChain: return "shared-chain";
    }
    return "?";
}

Adjacency Adjacency::from(const IsingModel& model) {
    Adjacency a;
    a.p = model.p;
    a.offset.assign(model.p + 1, 0);
    for (int i = 0; i < model.p; ++i)
        for (int j = 0; j < model.p; ++j)
            if (i != j && model.at(i, j) != 0.0) ++a.offset[i + 1];
    for (int i = 0; i < model.p; ++i) a.offset[i + 1] += a.offset[i];
    a.neighbor.resize(a.offset[model.p]);
    a.weight.resize(a.offset[model.p]);
    {
        std::vector<int> cur(a.offset.begin(), a.offset.end() - 1);
        for (int i = 0; i < model.p; ++i)
            for (int j = 0; j < model.p; ++j)
                if (i != j && model.at(i, j) != 0.0) {
                    a.neighbor[cur[i]] = j;
                    a.weight[cur[i]] = model.at(i, j);
                    ++cur[i];
                }
    }
    a.uniform = !a.weight.empty();
    a.alpha = a.weight.empty() ? 0.0 : a.weight[0];
    for (double w : a.weight)
        if (w != a.alpha) {
            a.uniform = false;
            break;
        }
    if (a.uniform) {
        // One block of conditional probabilities per distinct degree.  The
        // local field for neighbor-spin-sum S is built by |S| incremental
        // additions of alpha, reproducing the reference implementation's
        // rounding exactly for degrees <= 3.
        int dmax = 0;
        for (int i = 0; i < model.p; ++i)
            dmax = std::max(dmax, a.offset[i + 1] - a.offset[i]);
        std::vector<double> habs(dmax + 1, 0.0);
        for (int s = 1; s <= dmax; ++s) habs[s] = habs[s - 1] + a.alpha;
        std::vector<std::size_t> deg_base(dmax + 1,
                                          static_cast<std::size_t>(-1));
        a.table_at.resize(model.p);
        for (int i = 0; i < model.p; ++i) {
            const int deg = a.offset[i + 1] - a.offset[i];
            if (deg_base[deg] == static_cast<std::size_t>(-1)) {
                deg_base[deg] = a.table.size();
                for (int k = 0; k <= deg; ++k) {
                    const int s = 2 * k - deg;
                    const double h = s >= 0 ? habs[s] : -habs[-s];
                    a.table.push_back(1.0 / (1.0 + std::exp(-2.0 * h)));
                }
            }
            a.table_at[i] = deg_base[deg];
        }
    }
    return a;
}

void glauber_step(std::vector<std::int8_t>& state, const IsingModel& model,
                  SplitMix64& rng) {
    const int site = static_cast<int>(rng.below(model.p));
    const double u = rng.uniform01();
    double h = 0.0;
    for (int j = 0; j < model.p; ++j) h += model.at(site, j) * state[j];
    const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * h));
    state[site] = u < p_plus ? 1 : -1;
}

void glauber_step(std::int8_t* state, const Adjacency& adj, SplitMix64& rng) {
    const int site = static_cast<int>(rng.below(adj.p));
    const double u = rng.uniform01();
    double p_plus;
    if (adj.uniform) {
        int s = 0;
        for (int idx = adj.offset[site]; idx < adj.offset[site + 1]; ++idx)
            s += state[adj.neighbor[idx]];
        const int deg = adj.offset[site + 1] - adj.offset[site];
        p_plus = adj.table[adj.table_at[site] + (s + deg) / 2];
    } else {
        double h = 0.0;
        for (int idx = adj.offset[site]; idx < adj.offset[site + 1]; ++idx)
            h += adj.weight[idx] * state[adj.neighbor[idx]];
        p_plus = 1.0 / (1.0 + std::exp(-2.0 * h));
    }
    state[site] = u < p_plus ? 1 : -1;
}

namespace {

void uniform_init(std::int8_t* state, int p, SplitMix64& rng) {
    for (int i = 0; i < p; ++i) state[i] = rng.next() >> 63 ? 1 : -1;
}

} // namespace

SampleBatch sample(const IsingModel& model, long long n,
                   const SamplerConfig& config, int limit) {
    if (n < 1) throw parameter_error("sample: n must be positive");
    if (config.burn_in < 0)
        throw parameter_error("sample: burn_in must be nonnegative");
    SampleBatch out;
    out.p = model.p;
    out.n = n;
    out.seed = config.seed;
    out.burn_in = config.burn_in;
    out.mode = config.mode;
    out.spins.assign(static_cast<std::size_t>(n) * model.p, 0);

    switch (config.mode) {
        case SamplerMode::Glauber: {
            const Adjacency adj = Adjacency::from(model);
            const int nt = max_threads();
            (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
            for (long long chain = 0; chain < n; ++chain) {
                SplitMix64 rng(stream_key(config.seed, chain));
                std::int8_t* row = out.spins.data() +
                                   static_cast<std::size_t>(chain) * model.p;
                uniform_init(row, model.p, rng);
                for (long long step = 0; step < config.burn_in; ++step)
                    glauber_step(row, adj, rng);
            }
            break;
        }
        case SamplerMode::ExactOracle: {
            ExactOracleSampler oracle(model, limit);
            out = oracle.draw(n, config.seed);
            break;
        }
        case SamplerMode::GlauberSharedChain: {
            const Adjacency adj = Adjacency::from(model);
            const long long thin =
                std::max<long long>(model.p, config.burn_in / 4);
            SplitMix64 rng(stream_key(config.seed, 0x5ca1edULL));
            std::vector<std::int8_t> state(model.p);
            uniform_init(state.data(), model.p, rng);
            for (long long step = 0; step < config.burn_in; ++step)
                glauber_step(state.data(), adj, rng);
            for (long long i = 0; i < n; ++i) {
                for (long long step = 0; step < thin; ++step)
                    glauber_step(state.data(), adj, rng);
                std::copy(state.begin(), state.end(),
                          out.spins.begin() +
                              static_cast<std::size_t>(i) * model.p);
            }
            break;
        }
    }
    return out;
}

ExactOracleSampler::ExactOracleSampler(const IsingModel& model, int limit)
    : p_(model.p) {
    std::vector<double> dist = exact_distribution(model, limit);
    cdf_.resize(dist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist[i];
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
}

SampleBatch ExactOracleSampler::draw(long long n, std::uint64_t seed) const {
    if (n < 1) throw parameter_error("draw: n must be positive");
    SampleBatch out;
    out.p = p_;
    out.n = n;
    out.seed = seed;
    out.burn_in = 0;
    out.mode = SamplerMode::ExactOracle;
    out.spins.assign(static_cast<std::size_t>(n) * p_, 0);
    const int nt = max_threads();
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long i = 0; i < n; ++i) {
        SplitMix64 rng(stream_key(seed, i));
        const double u = rng.uniform01();
        const std::size_t mask =
            std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
        std::int8_t* row = out.spins.data() + static_cast<std::size_t>(i) * p_;
        for (int b = 0; b < p_; ++b) row[b] = (mask >> b) & 1 ? 1 : -1;
    }
    return out;
}

long long estimate_autocorrelation_time(const IsingModel& model,
                                        const ConfigStatistic& statistic,
                                        std::uint64_t seed,
                                        long long chain_steps) {
    const int p = model.p;
    ConfigStatistic stat = statistic;
    if (!stat) {
        const GraphStructure g = network_structure(model);
        stat = [edges = g.edges](const std::int8_t* s, int) {
            double t = 0.0;
            for (const auto& [i, j] : edges)
                t += static_cast<double>(s[i]) * s[j];
            return t;
        };
    }
    const long long steps = chain_steps > 0
                                ? chain_steps
                                : std::max<long long>(20000, 800ll * p);
    const Adjacency adj = Adjacency::from(model);
    SplitMix64 rng(stream_key(seed, 0xac0221ULL));
    std::vector<std::int8_t> state(p);
    uniform_init(state.data(), p, rng);
    std::vector<double> series;
    series.reserve(steps);
    for (long long t = 0; t < steps; ++t) {
        glauber_step(state.data(), adj, rng);
        series.push_back(stat(state.data(), p));
    }
    // Drop the first tenth as warm-up.
    const std::size_t warm = series.size() / 10;
    const std::size_t n = series.size() - warm;
    const double* x = series.data() + warm;
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += x[t];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t t = 0; t < n; ++t) var += (x[t] - mean) * (x[t] - mean);
    var /= static_cast<double>(n);
    const std::size_t lag_max = n / 4;
    if (!(var > 0.0))
        throw inconclusive_error(
            "autocorrelation: statistic is (numerically) constant",
            static_cast<double>(lag_max));
    for (std::size_t lag = 1; lag <= lag_max; ++lag) {
        double c = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t)
            c += (x[t] - mean) * (x[t + lag] - mean);
        c /= static_cast<double>(n - lag);
        if (c / var < 0.05) return static_cast<long long>(lag);
    }
    throw inconclusive_error(
        "autocorrelation: no decorrelation within the scanned lags",
        static_cast<double>(lag_max));
}

void write_batch(const SampleBatch& batch, std::ostream& out) {
    out << batch.p << " " << batch.n << " " << batch.seed << "\n";
    for (long long i = 0; i < batch.n; ++i) {
        for (int j = 0; j < batch.p; ++j) {
            if (j) out << " ";
            out << static_cast<int>(batch.at(i, j));
        }
        out << "\n";
    }
}

void write_batch_file(const SampleBatch& batch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open for writing: " + path);
    write_batch(batch, out);
}

SampleBatch read_batch(std::istream& in) {
    std::string line;
    SampleBatch batch;
    bool have_header = false;
    long long row = 0;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!have_header) {
            if (ls >> batch.p >> batch.n >> batch.seed) {
                if (batch.p < 1 || batch.n < 0)
                    throw parameter_error("batch file: bad header");
                batch.spins.assign(
                    static_cast<std::size_t>(batch.n) * batch.p, 0);
                have_header = true;
            } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw parameter_error("batch file: first data line must be "
                                      "'p n seed'");
            }
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (row >= batch.n)
            throw parameter_error("batch file: more rows than declared");
        for (int j = 0; j < batch.p; ++j) {
            int v;
            if (!(ls >> v) || (v != 1 && v != -1))
                throw parameter_error("batch file: entries must be +1 or -1");
            batch.spins[static_cast<std::size_t>(row) * batch.p + j] =
                static_cast<std::int8_t>(v);
        }
        ++row;
    }
    if (!have_header) throw parameter_error("batch file: empty");
    if (row != batch.n)
        throw parameter_error("batch file: fewer rows than declared");
    return batch;
}

SampleBatch read_batch_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open batch file: " + path);
    return read_batch(in);
}

} // namespace ising
