#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/model.hpp"
#include "ising/rng.hpp"

namespace ising {

enum class SamplerMode { Glauber, ExactOracle, GlauberSharedChain };
SamplerMode sampler_mode_from_name(const std::string& name);
const char* sampler_mode_name(SamplerMode mode);

struct SamplerConfig {
    long long burn_in = 1600;    // single-site updates per chain
    std::uint64_t seed = 0;
    SamplerMode mode = SamplerMode::Glauber;
};

struct SampleBatch {
    int p = 0;
    long long n = 0;
    std::vector<std::int8_t> spins; // n rows of p entries, each +1/-1
    // provenance
    std::uint64_t seed = 0;
    long long burn_in = 0;
    SamplerMode mode = SamplerMode::Glauber;

    std::int8_t at(long long sample, int site) const {
        return spins[static_cast<std::size_t>(sample) * p + site];
    }
};

// Cached neighbor lists; when all nonzero weights equal one signed value the
// conditional probabilities are precomputed per (degree, neighbor-spin-sum)
// so the Glauber inner loop avoids exp() entirely.
struct Adjacency {
    int p = 0;
    std::vector<int> offset;    // size p+1
    std::vector<int> neighbor;
    std::vector<double> weight;
    bool uniform = false;
    double alpha = 0.0;
    std::vector<double> table;       // P(+1) entries, grouped by degree
    std::vector<std::size_t> table_at; // per node: base index + degree

    static Adjacency from(const IsingModel& model);
};

// One Glauber update: pick a site uniformly, resample it from its
// conditional, P(X_i = +1 | rest) = 1/(1 + exp(-2 sum_j theta_ij x_j)).
// The model overload is the plain reference; the Adjacency overload is the
// equivalent fast path used by sample().  Both consume exactly two RNG draws.
void glauber_step(std::vector<std::int8_t>& state, const IsingModel& model,
                  SplitMix64& rng);
void glauber_step(std::int8_t* state, const Adjacency& adj, SplitMix64& rng);

// Draw n samples.  Glauber mode runs one independent chain per sample:
// uniform random initial state, burn_in single-site updates, final state
// emitted.  ExactOracle mode (p <= limit) draws i.i.d. by inverse CDF from
// the enumerated distribution.  GlauberSharedChain runs a single chain and
// emits every max(p, burn_in/4) steps after an initial burn_in (faster,
// weakly dependent samples; not used by the reproduction experiments).
SampleBatch sample(const IsingModel& model, long long n,
                   const SamplerConfig& config, int limit = kEnumerationLimit);

// Reusable inverse-CDF sampler for small models (builds the distribution once).
class ExactOracleSampler {
public:
    explicit ExactOracleSampler(const IsingModel& model, int limit = kEnumerationLimit);
    SampleBatch draw(long long n, std::uint64_t seed) const;
    int p() const { return p_; }

private:
    int p_;
    std::vector<double> cdf_;
};

// Statistic of one configuration; defaults to the edge-correlation statistic
// over G(model) when empty.
using ConfigStatistic = std::function<double(const std::int8_t* state, int p)>;

// Runs one long chain, evaluates the statistic each step, and returns the
// first lag at which the empirical autocorrelation drops below 0.05.
// chain_steps = 0 picks max(20000, 800 p); the first tenth of the chain is
// discarded as warm-up.  Throws inconclusive_error (with the deepest lag
// scanned attached) if no crossing occurs or the statistic is degenerate.
long long estimate_autocorrelation_time(const IsingModel& model,
                                        const ConfigStatistic& statistic,
                                        std::uint64_t seed,
                                        long long chain_steps = 0);

// Batch file format: line 1 "p n seed", then n lines of p entries of +-1.
void write_batch(const SampleBatch& batch, std::ostream& out);
void write_batch_file(const SampleBatch& batch, const std::string& path);
SampleBatch read_batch(std::istream& in);
SampleBatch read_batch_file(const std::string& path);

} // namespace ising
