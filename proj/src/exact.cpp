#include "ising/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ising {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_enumerable(const IsingModel& model, int limit, const char* what) {
    if (model.p < 1) throw parameter_error("model has no nodes");
    int cap = std::min(limit, 30);
    if (model.p > cap)
        throw capacity_error(std::string(what) + ": " + std::to_string(model.p) +
                             " nodes exceeds the enumeration limit " +
                             std::to_string(cap));
}

// Compressed adjacency of the nonzero couplings, for incremental energy
// updates along the Gray-code walk.
struct Adj {
    std::vector<int> off;
    std::vector<int> nbr;
    std::vector<double> wt;

    static Adj from(const IsingModel& m) {
        Adj a;
        a.off.assign(m.p + 1, 0);
        for (int i = 0; i < m.p; ++i)
            for (int j = 0; j < m.p; ++j)
                if (i != j && m.at(i, j) != 0.0) ++a.off[i + 1];
        for (int i = 0; i < m.p; ++i) a.off[i + 1] += a.off[i];
        a.nbr.resize(a.off[m.p]);
        a.wt.resize(a.off[m.p]);
        std::vector<int> cur(a.off.begin(), a.off.end() - 1);
        for (int i = 0; i < m.p; ++i)
            for (int j = 0; j < m.p; ++j)
                if (i != j && m.at(i, j) != 0.0) {
                    a.nbr[cur[i]] = j;
                    a.wt[cur[i]] = m.at(i, j);
                    ++cur[i];
                }
        return a;
    }
};

// Streaming log-sum-exp with max shifting.
struct Lse {
    double m = kNegInf;
    double s = 0.0;

    void add(double x) {
        if (x <= m) {
            s += std::exp(x - m);
        } else {
            s = s * std::exp(m - x) + 1.0;
            m = x;
        }
    }
    void merge(const Lse& o) {
        if (o.s == 0.0) return;
        if (s == 0.0) {
            *this = o;
            return;
        }
        if (o.m <= m) {
            s += o.s * std::exp(o.m - m);
        } else {
            s = s * std::exp(m - o.m) + o.s;
            m = o.m;
        }
    }
    double value() const { return s == 0.0 ? kNegInf : m + std::log(s); }
};

double logsumexp2(double a, double b) {
    Lse acc;
    acc.add(a);
    acc.add(b);
    return acc.value();
}

double logsumexp(const std::vector<double>& xs) {
    Lse acc;
    for (double x : xs)
        if (x != kNegInf) acc.add(x);
    return acc.value();
}

// Walk states k in [b, e) in Gray-code order; the visitor receives the Gray
// mask (bit i set means x_i = +1), the energy, and the spin array.  The
// energy is anchored by a full recomputation at k = b, so chunk boundaries
// fix the rounding pattern no matter how chunks are assigned to threads.
template <class F>
void walk_states(const IsingModel& model, const Adj& adj, std::uint64_t b,
                 std::uint64_t e, F&& f) {
    const int p = model.p;
    std::vector<std::int8_t> s(p);
    const std::uint64_t g0 = b ^ (b >> 1);
    for (int i = 0; i < p; ++i) s[i] = (g0 >> i) & 1 ? 1 : -1;
    double energy = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            energy += model.at(i, j) * s[i] * s[j];
    for (std::uint64_t k = b; k < e; ++k) {
        f(k ^ (k >> 1), energy, s);
        if (k + 1 < e) {
            int i = std::countr_zero(k + 1);
            double h = 0.0;
            for (int idx = adj.off[i]; idx < adj.off[i + 1]; ++idx)
                h += adj.wt[idx] * s[adj.nbr[idx]];
            energy -= 2.0 * s[i] * h;
            s[i] = -s[i];
        }
    }
}

// Chunk layout shared by every parallel enumeration: a power-of-two chunk
// count that depends only on p, so results are reproducible for any thread
// count.
int chunk_count(int p) { return p >= 8 ? 256 : 1 << p; }

// Exact binomial row C(g, 0..g); exact in doubles for g <= 52.
std::vector<double> binomial_row(int g) {
    std::vector<double> row(g + 1);
    row[0] = 1.0;
    for (int j = 1; j <= g; ++j) row[j] = row[j - 1] * (g - j + 1) / j;
    return row;
}

// N[k][q] = number of ways to pick occupancies j_1..j_B in [0, g] with
// sum j = k and sum j^2 = q, weighted by prod C(g, j_b).  All entries are
// integers below 2^(B g), exact in doubles for B g <= 52.
struct OccupancyTable {
    int kmax = 0, qmax = 0;
    std::vector<double> n; // (kmax+1) x (qmax+1)

    double at(int k, int q) const {
        return n[static_cast<std::size_t>(k) * (qmax + 1) + q];
    }
};

OccupancyTable occupancy_counts(int B, int g) {
    OccupancyTable t;
    t.kmax = B * g;
    t.qmax = B * g * g;
    t.n.assign(static_cast<std::size_t>(t.kmax + 1) * (t.qmax + 1), 0.0);
    t.n[0] = 1.0;
    std::vector<double> cg = binomial_row(g);
    std::vector<double> next(t.n.size());
    for (int b = 0; b < B; ++b) {
        std::fill(next.begin(), next.end(), 0.0);
        int kcur = b * g, qcur = b * g * g;
        for (int k = 0; k <= kcur; ++k)
            for (int q = 0; q <= qcur; ++q) {
                double c = t.n[static_cast<std::size_t>(k) * (t.qmax + 1) + q];
                if (c == 0.0) continue;
                for (int j = 0; j <= g; ++j)
                    next[static_cast<std::size_t>(k + j) * (t.qmax + 1) + q + j * j] +=
                        c * cg[j];
            }
        t.n.swap(next);
    }
    return t;
}

} // namespace

double log_partition(const IsingModel& model, int limit) {
    check_enumerable(model, limit, "log_partition");
    const std::uint64_t nstates = 1ull << model.p;
    const int nchunks = chunk_count(model.p);
    const std::uint64_t len = nstates / nchunks;
    const Adj adj = Adj::from(model);
    std::vector<Lse> part(nchunks);
    const int nt = max_threads();
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (int c = 0; c < nchunks; ++c) {
        Lse acc;
        walk_states(model, adj, c * len, (c + 1) * len,
                    [&](std::uint64_t, double e, const std::vector<std::int8_t>&) {
                        acc.add(e);
                    });
        part[c] = acc;
    }
    for (int stride = 1; stride < nchunks; stride *= 2)
        for (int i = 0; i + stride < nchunks; i += 2 * stride)
            part[i].merge(part[i + stride]);
    return part[0].value();
}

double log_partition_serial(const IsingModel& model, int limit) {
    check_enumerable(model, limit, "log_partition");
    const std::uint64_t nstates = 1ull << model.p;
    const Adj adj = Adj::from(model);
    Lse acc;
    walk_states(model, adj, 0, nstates,
                [&](std::uint64_t, double e, const std::vector<std::int8_t>&) {
                    acc.add(e);
                });
    return acc.value();
}

std::vector<double> pair_moments(const IsingModel& model, int limit) {
    check_enumerable(model, limit, "pair_moments");
    const int p = model.p;
    const double logz = log_partition(model, limit);
    const std::uint64_t nstates = 1ull << p;
    const int nchunks = chunk_count(p);
    const std::uint64_t len = nstates / nchunks;
    const Adj adj = Adj::from(model);
    const std::size_t pp = static_cast<std::size_t>(p) * p;
    std::vector<std::vector<double>> part(nchunks);
    const int nt = max_threads();
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (int c = 0; c < nchunks; ++c) {
        std::vector<double> acc(pp, 0.0);
        walk_states(model, adj, c * len, (c + 1) * len,
                    [&](std::uint64_t, double e, const std::vector<std::int8_t>& s) {
                        const double w = std::exp(e - logz);
                        for (int i = 0; i < p; ++i) {
                            const double wi = s[i] > 0 ? w : -w;
                            for (int j = i + 1; j < p; ++j)
                                acc[static_cast<std::size_t>(i) * p + j] +=
                                    s[j] > 0 ? wi : -wi;
                        }
                    });
        part[c] = std::move(acc);
    }
    for (int stride = 1; stride < nchunks; stride *= 2)
        for (int i = 0; i + stride < nchunks; i += 2 * stride)
            for (std::size_t k = 0; k < pp; ++k) part[i][k] += part[i + stride][k];
    std::vector<double> out = std::move(part[0]);
    for (int i = 0; i < p; ++i) {
        out[static_cast<std::size_t>(i) * p + i] = 1.0;
        for (int j = i + 1; j < p; ++j)
            out[static_cast<std::size_t>(j) * p + i] =
                out[static_cast<std::size_t>(i) * p + j];
    }
    return out;
}

std::vector<double> pair_moments_serial(const IsingModel& model, int limit) {
    check_enumerable(model, limit, "pair_moments");
    const int p = model.p;
    const double logz = log_partition_serial(model, limit);
    const Adj adj = Adj::from(model);
    std::vector<double> out(static_cast<std::size_t>(p) * p, 0.0);
    walk_states(model, adj, 0, 1ull << p,
                [&](std::uint64_t, double e, const std::vector<std::int8_t>& s) {
                    const double w = std::exp(e - logz);
                    for (int i = 0; i < p; ++i)
                        for (int j = i + 1; j < p; ++j)
                            out[static_cast<std::size_t>(i) * p + j] +=
                                w * s[i] * s[j];
                });
    for (int i = 0; i < p; ++i) {
        out[static_cast<std::size_t>(i) * p + i] = 1.0;
        for (int j = i + 1; j < p; ++j)
            out[static_cast<std::size_t>(j) * p + i] =
                out[static_cast<std::size_t>(i) * p + j];
    }
    return out;
}

std::vector<double> exact_distribution(const IsingModel& model, int limit) {
    check_enumerable(model, limit, "exact_distribution");
    const double logz = log_partition(model, limit);
    const std::uint64_t nstates = 1ull << model.p;
    const int nchunks = chunk_count(model.p);
    const std::uint64_t len = nstates / nchunks;
    const Adj adj = Adj::from(model);
    std::vector<double> dist(nstates);
    const int nt = max_threads();
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (int c = 0; c < nchunks; ++c)
        walk_states(model, adj, c * len, (c + 1) * len,
                    [&](std::uint64_t mask, double e, const std::vector<std::int8_t>&) {
                        dist[mask] = std::exp(e - logz);
                    });
    return dist;
}

double chi_square(const IsingModel& q, const IsingModel& p, int limit) {
    if (q.p != p.p)
        throw dimension_error("chi_square: node counts differ");
    check_enumerable(q, limit, "chi_square");
    IsingModel r(q.p);
    for (int i = 0; i < q.p; ++i)
        for (int j = i + 1; j < q.p; ++j)
            if (double w = 2.0 * q.at(i, j) - p.at(i, j); w != 0.0)
                r.set_edge(i, j, w);
    const double logzp = log_partition(p, limit);
    const double logzq = log_partition(q, limit);
    const double logzr = log_partition(r, limit);
    return std::expm1(logzp + logzr - 2.0 * logzq);
}

double chi_square_direct(const IsingModel& q, const IsingModel& p, int limit) {
    if (q.p != p.p)
        throw dimension_error("chi_square: node counts differ");
    check_enumerable(q, limit, "chi_square");
    const int n = q.p;
    const std::uint64_t nstates = 1ull << n;
    const Adj adjq = Adj::from(q);
    const Adj adjp = Adj::from(p);
    std::vector<std::int8_t> s(n, -1);
    double eq = 0.0, ep = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            eq += q.at(i, j) * s[i] * s[j];
            ep += p.at(i, j) * s[i] * s[j];
        }
    Lse lq, lp, lmix;
    for (std::uint64_t k = 0;; ++k) {
        lq.add(eq);
        lp.add(ep);
        lmix.add(2.0 * eq - ep);
        if (k + 1 == nstates) break;
        const int i = std::countr_zero(k + 1);
        double hq = 0.0, hp = 0.0;
        for (int idx = adjq.off[i]; idx < adjq.off[i + 1]; ++idx)
            hq += adjq.wt[idx] * s[adjq.nbr[idx]];
        for (int idx = adjp.off[i]; idx < adjp.off[i + 1]; ++idx)
            hp += adjp.wt[idx] * s[adjp.nbr[idx]];
        eq -= 2.0 * s[i] * hq;
        ep -= 2.0 * s[i] * hp;
        s[i] = -s[i];
    }
    return std::expm1(lmix.value() + lp.value() - 2.0 * lq.value());
}

double tensorize(double kappa, long long n) {
    if (n < 0) throw parameter_error("tensorize: n must be nonnegative");
    if (kappa <= -1.0)
        throw parameter_error("tensorize: kappa must exceed -1");
    return std::expm1(static_cast<double>(n) * std::log1p(kappa));
}

double log_binomial(long long n, long long k) {
    if (n < 0) throw parameter_error("log_binomial: n must be nonnegative");
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

MixtureChi2 mixture_chi_square(const ChangeEnsemble& ensemble, long long n,
                               int limit) {
    if (!ensemble.product_form)
        throw model_class_error(
            "mixture_chi_square: exact formula needs a product-form ensemble");
    if (n < 1) throw parameter_error("mixture_chi_square: n must be positive");
    const long long m = ensemble.m, t = ensemble.t;
    if (t < 1 || t > m)
        throw parameter_error("mixture_chi_square: need 1 <= t <= m");
    const double kappa =
        chi_square(ensemble.block_alt, ensemble.block_null, limit);
    // log(1 + a_n) with a_n = (1+kappa)^n - 1.
    const double la = static_cast<double>(n) * std::log1p(kappa);
    const double an = std::expm1(la);

    MixtureChi2 out;
    out.block_chi2 = an;
    out.binomial_bound =
        std::expm1(static_cast<double>(t) * static_cast<double>(t) * an / m);

    const long long klo = std::max<long long>(0, 2 * t - m);
    const double logcmt = log_binomial(m, t);
    if (static_cast<double>(t) * la <= 700.0) {
        // Every term pmf_k * ((1+a_n)^k - 1) is nonnegative: full precision.
        double acc = 0.0;
        for (long long k = klo; k <= t; ++k) {
            const double logpmf =
                log_binomial(t, k) + log_binomial(m - t, t - k) - logcmt;
            acc += std::exp(logpmf) * std::expm1(k * la);
        }
        out.value = acc;
    } else {
        Lse lse;
        for (long long k = klo; k <= t; ++k)
            lse.add(log_binomial(t, k) + log_binomial(m - t, t - k) - logcmt +
                    k * la);
        out.value = std::expm1(lse.value());
    }
    return out;
}

double mixture_chi_square_enumerated(const ChangeEnsemble& ensemble, int n,
                                     int limit) {
    const int p = ensemble.base.p;
    if (n < 1) throw parameter_error("mixture_chi_square: n must be positive");
    if (n * p > std::min(limit, 30))
        throw capacity_error("mixture_chi_square_enumerated: joint state space "
                             "exceeds the enumeration limit");
    const int m = ensemble.m, t = ensemble.t;
    double logsubsets = log_binomial(m, t);
    if (logsubsets > std::log(20000.0) ||
        std::exp(logsubsets) * std::ldexp(1.0, p) > 2e7)
        throw capacity_error(
            "mixture_chi_square_enumerated: too many alternates to enumerate");

    std::vector<std::vector<double>> alts;
    std::vector<int> comb(t);
    for (int i = 0; i < t; ++i) comb[i] = i;
    while (true) {
        alts.push_back(exact_distribution(ensemble.make_alternate(comb), limit));
        int i = t - 1;
        while (i >= 0 && comb[i] == m - t + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < t; ++j) comb[j] = comb[j - 1] + 1;
    }
    const std::vector<double> pdist = exact_distribution(ensemble.base, limit);
    const double inv_n_alts = 1.0 / static_cast<double>(alts.size());
    const std::uint64_t mask_p = (1ull << p) - 1;
    const std::uint64_t joint_states = 1ull << (n * p);
    double acc = 0.0;
    for (std::uint64_t joint = 0; joint < joint_states; ++joint) {
        double mix = 0.0;
        for (const auto& qdist : alts) {
            double prod = 1.0;
            for (int i = 0; i < n; ++i)
                prod *= qdist[(joint >> (i * p)) & mask_p];
            mix += prod;
        }
        mix *= inv_n_alts;
        double denom = 1.0;
        for (int i = 0; i < n; ++i) denom *= pdist[(joint >> (i * p)) & mask_p];
        acc += mix * mix / denom;
    }
    return acc - 1.0;
}

// ---------------------------------------------------------------------------
// Symmetry-reduced partition sums.
// ---------------------------------------------------------------------------

double log_clique_partition_sum(int d, double lambda, int ell, int i) {
    if (d < 1 || ell < 0 || ell > d + 1 || i < 0 || i > ell)
        throw parameter_error("log_clique_partition_sum: bad indices");
    const int n = d + 1 - ell;
    Lse acc;
    for (int j = 0; j <= n; ++j)
        acc.add(log_binomial(n, j) -
                2.0 * lambda * j * (d + 1 - 2 * i - j));
    return acc.value();
}

double clique_partition_sum(int d, double lambda, int ell, int i) {
    return std::exp(log_clique_partition_sum(d, lambda, ell, i));
}

double log_partition_clique_special_edge(int d, double lambda, double w) {
    if (d < 2) throw parameter_error("clique_special_edge: d >= 2 required");
    const double eta = w - lambda;
    const double ls1 = log_clique_partition_sum(d, lambda, 2, 0);
    const double ls2 = log_clique_partition_sum(d, lambda, 2, 1);
    return std::log(2.0) +
           logsumexp2(eta + lambda * d * (d + 1) / 2.0 + ls1,
                      -eta + lambda * d * (d - 3) / 2.0 + ls2);
}

double log_partition_clique_with_hole(int d, int ell, double lambda, double w) {
    if (d < 2 || ell < 2 || ell > d)
        throw parameter_error("clique_with_hole: need 2 <= ell <= d");
    std::vector<double> terms;
    terms.reserve(ell + 1);
    for (int i = 0; i <= ell; ++i) {
        const double g = static_cast<double>(i) * (ell - i);
        terms.push_back(log_binomial(ell, i) + 2.0 * lambda * g -
                        2.0 * lambda * i * (d + 1 - i) - 2.0 * w * g +
                        log_clique_partition_sum(d, lambda, ell, i));
    }
    const double prefactor = lambda * (d + 1) * d / 2.0 -
                             lambda * ell * (ell - 1) / 2.0 +
                             w * ell * (ell - 1) / 2.0;
    return prefactor + logsumexp(terms);
}

namespace {

void check_multipartite(int d, int ell, int min_groups, const char* what) {
    const int g = ell + 1;
    if (ell < 1 || d < min_groups * g || d % g != 0)
        throw parameter_error(std::string(what) +
                              ": d must be a multiple of ell+1 with at least " +
                              std::to_string(min_groups) + " group(s)");
    if (d > 52)
        throw capacity_error(std::string(what) +
                             ": occupancy counts are exact in doubles only for "
                             "d <= 52");
}

// Within-group pair sum for total occupancy (k, q) over groups of size g on
// d nodes, and the matching cross-group pair sum.
long long within_pairs(int d, int g, int k, int q) {
    return (static_cast<long long>(g) * (d - 4 * k) + 4ll * q - d) / 2;
}
long long all_pairs(int d, int k) {
    const long long m = d - 2ll * k;
    return (m * m - d) / 2;
}

} // namespace

double log_partition_multipartite(int d, int ell, double lambda, double w) {
    check_multipartite(d, ell, 1, "multipartite");
    const int g = ell + 1, B = d / g;
    const OccupancyTable occ = occupancy_counts(B, g);
    Lse acc;
    for (int k = 0; k <= occ.kmax; ++k)
        for (int q = 0; q <= occ.qmax; ++q) {
            const double c = occ.at(k, q);
            if (c == 0.0) continue;
            const long long w2 = within_pairs(d, g, k, q);
            const long long cross = all_pairs(d, k) - w2;
            acc.add(std::log(c) + lambda * cross + w * w2);
        }
    return acc.value();
}

double log_partition_multipartite_extra(int d, int ell, double lambda,
                                        double w) {
    check_multipartite(d, ell, 1, "multipartite_extra");
    const int g = ell + 1, B = d / g;
    const OccupancyTable occ = occupancy_counts(B - 1, g);
    const std::vector<double> cg = binomial_row(g);
    Lse acc;
    for (int j1 = 0; j1 <= g; ++j1) {
        const int m1 = g - 2 * j1;
        for (int kp = 0; kp <= occ.kmax; ++kp)
            for (int qp = 0; qp <= occ.qmax; ++qp) {
                const double c = occ.at(kp, qp);
                if (c == 0.0) continue;
                const int k = j1 + kp, q = j1 * j1 + qp;
                const long long w2 = within_pairs(d, g, k, q);
                const long long cross = all_pairs(d, k) - w2;
                const double base = std::log(cg[j1] * c) + lambda * cross;
                const double a = lambda * (d - 2 * k - m1) + w * m1;
                acc.add(base + a);
                acc.add(base - a);
            }
    }
    return acc.value();
}

double log_partition_clique(int m, double mu) {
    if (m < 1) throw parameter_error("clique: m >= 1 required");
    Lse acc;
    for (int j = 0; j <= m; ++j) {
        const double t = static_cast<double>(m - 2 * j);
        acc.add(log_binomial(m, j) + mu * (t * t - m) / 2.0);
    }
    return acc.value();
}

double log_linear_family_chi2(const std::vector<double>& logw,
                              const std::vector<double>& shift) {
    const std::size_t n = logw.size();
    if (shift.size() != n || n == 0)
        throw parameter_error("log_linear_family_chi2: mismatched family");
    if (n > 20000)
        throw capacity_error("log_linear_family_chi2: family too large");
    Lse num;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double h = 0.5 * (shift[i] - shift[j]);
            if (h == 0.0) continue;
            // log(4 sinh^2 h); |sinh| keeps the log real for either sign.
            const double ls = std::log(4.0) +
                              2.0 * std::log(std::fabs(std::sinh(h)));
            num.add(logw[i] + logw[j] + ls);
            any = true;
        }
    if (!any) return 0.0;
    return std::exp(num.value() - 2.0 * logsumexp(logw));
}

// ---------------------------------------------------------------------------
// Widget chi-square closed forms.
// ---------------------------------------------------------------------------

namespace {

// log(cosh x), safe for any magnitude.
double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log(1 + e^x), safe for any magnitude.
double log1p_exp(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// The triangle / fan blade factor: log(e^w cosh 2 lambda + e^-w).
double log_blade(double lambda, double w) {
    return logsumexp2(w + log_cosh(2.0 * lambda), -w);
}

// log of the per-blade ratio minus one: z_0 z_2mu / z_mu^2 - 1
//   = 4 sinh^2(mu) cosh(2 lambda) / z_mu^2.
double log_blade_ratio_m1(double lambda, double mu) {
    return std::log(4.0) + 2.0 * std::log(std::fabs(std::sinh(mu))) +
           log_cosh(2.0 * lambda) - 2.0 * log_blade(lambda, mu);
}

void require_spec(bool ok, const std::string& condition) {
    if (!ok)
        throw construction_error("widget construction requires " + condition);
}

// Terms of the special-edge clique family Z(x) = Z_clique(edge = x mu).
void clique_special_edge_family(int d, double lambda, double mu,
                                std::vector<double>& logw,
                                std::vector<double>& shift) {
    logw = {lambda * (d - 1) + log_clique_partition_sum(d, lambda, 2, 0),
            -lambda * (d - 1) + log_clique_partition_sum(d, lambda, 2, 1)};
    shift = {mu, -mu};
}

// Terms of the hole family Z(x) = Z_hole(hole weight = base + x mu).
void clique_hole_family(int d, int ell, double lambda, double mu, double base,
                        std::vector<double>& logw, std::vector<double>& shift) {
    logw.clear();
    shift.clear();
    for (int i = 0; i <= ell; ++i) {
        const double g = static_cast<double>(i) * (ell - i);
        logw.push_back(log_binomial(ell, i) + 2.0 * lambda * g -
                       2.0 * lambda * i * (d + 1 - i) - 2.0 * base * g +
                       log_clique_partition_sum(d, lambda, ell, i));
        shift.push_back(-2.0 * mu * g);
    }
}

// Terms of the multipartite family Z(x) = Z(within = base + x mu).
void multipartite_family(int d, int ell, double lambda, double mu, double base,
                         std::vector<double>& logw,
                         std::vector<double>& shift) {
    const int g = ell + 1, B = d / g;
    const OccupancyTable occ = occupancy_counts(B, g);
    logw.clear();
    shift.clear();
    for (int k = 0; k <= occ.kmax; ++k)
        for (int q = 0; q <= occ.qmax; ++q) {
            const double c = occ.at(k, q);
            if (c == 0.0) continue;
            const long long w2 = within_pairs(d, g, k, q);
            const long long cross = all_pairs(d, k) - w2;
            logw.push_back(std::log(c) + lambda * cross + base * w2);
            shift.push_back(mu * w2);
        }
}

// Terms of the extra-node family Z(x) = Z(last-group coupling = base + x mu).
void multipartite_extra_family(int d, int ell, double lambda, double mu,
                               double base, std::vector<double>& logw,
                               std::vector<double>& shift) {
    const int g = ell + 1, B = d / g;
    const OccupancyTable occ = occupancy_counts(B - 1, g);
    const std::vector<double> cg = binomial_row(g);
    logw.clear();
    shift.clear();
    for (int j1 = 0; j1 <= g; ++j1) {
        const int m1 = g - 2 * j1;
        for (int kp = 0; kp <= occ.kmax; ++kp)
            for (int qp = 0; qp <= occ.qmax; ++qp) {
                const double c = occ.at(kp, qp);
                if (c == 0.0) continue;
                const int k = j1 + kp, q = j1 * j1 + qp;
                const long long w2 = within_pairs(d, g, k, q);
                const long long cross = all_pairs(d, k) - w2;
                const double lw = std::log(cg[j1] * c) + lambda * cross;
                const double lam_part = lambda * (d - 2 * k - m1);
                logw.push_back(lw + lam_part + base * m1);
                shift.push_back(mu * m1);
                logw.push_back(lw - lam_part - base * m1);
                shift.push_back(-mu * m1);
            }
    }
}

// Terms of the clique family Z(x) = Z_clique(weight = base + x mu).
void clique_family(int m, double mu, double base, std::vector<double>& logw,
                   std::vector<double>& shift) {
    logw.clear();
    shift.clear();
    for (int j = 0; j <= m; ++j) {
        const double t = static_cast<double>(m - 2 * j);
        const double e = (t * t - m) / 2.0;
        logw.push_back(log_binomial(m, j) + base * e);
        shift.push_back(mu * e);
    }
}

} // namespace

bool widget_has_reverse_form(WidgetFamily family) {
    return family == WidgetFamily::CliqueWithHole ||
           family == WidgetFamily::CliqueVsEmpty;
}

double widget_chi2_closed_form(const WidgetSpec& spec) {
    std::vector<double> logw, shift;
    switch (spec.family) {
        case WidgetFamily::SingleEdge: {
            require_spec(spec.mu != 0.0, "mu != 0");
            const double s = std::sinh(spec.mu);
            return s * s;
        }
        case WidgetFamily::Triangle: {
            require_spec(spec.mu != 0.0, "mu != 0");
            return std::exp(log_blade_ratio_m1(spec.lambda, spec.mu));
        }
        case WidgetFamily::Fan: {
            require_spec(spec.blades >= 1, "blades >= 1");
            require_spec(spec.ell >= 1 && spec.ell <= spec.blades,
                         "1 <= ell <= blades");
            require_spec(spec.mu != 0.0, "mu != 0");
            const double lr = log_blade_ratio_m1(spec.lambda, spec.mu);
            return std::expm1(spec.ell * log1p_exp(lr));
        }
        case WidgetFamily::CliqueMinusEdge: {
            require_spec(spec.d >= 2, "d >= 2");
            require_spec(spec.mu != 0.0, "mu != 0");
            clique_special_edge_family(spec.d, spec.lambda, spec.mu, logw,
                                       shift);
            return log_linear_family_chi2(logw, shift);
        }
        case WidgetFamily::CliqueWithHole: {
            require_spec(spec.d >= 3, "d >= 3");
            require_spec(spec.ell >= 2 && spec.ell <= spec.d - 1,
                         "2 <= ell <= d-1");
            require_spec(spec.mu != 0.0, "mu != 0");
            clique_hole_family(spec.d, spec.ell, spec.lambda, spec.mu, 0.0,
                               logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
        case WidgetFamily::EmmentalerExtraNode: {
            require_spec(spec.ell >= 1, "ell >= 1");
            require_spec(spec.d >= 2 * (spec.ell + 1) &&
                             spec.d % (spec.ell + 1) == 0,
                         "d a multiple of ell+1 with at least two groups");
            require_spec(spec.mu != 0.0, "mu != 0");
            multipartite_extra_family(spec.d, spec.ell, spec.lambda, spec.mu,
                                      spec.mu, logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
        case WidgetFamily::EmmentalerVsFull: {
            require_spec(spec.ell >= 1, "ell >= 1");
            require_spec(spec.d >= 2 * (spec.ell + 1) &&
                             spec.d % (spec.ell + 1) == 0,
                         "d a multiple of ell+1 with at least two groups");
            require_spec(spec.mu != 0.0, "mu != 0");
            multipartite_family(spec.d, spec.ell, spec.lambda, spec.mu,
                                spec.mu, logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
        case WidgetFamily::CliqueVsEmpty: {
            require_spec(spec.d >= 2, "d >= 2");
            require_spec(spec.mu != 0.0, "mu != 0");
            clique_family(spec.d, spec.mu, 0.0, logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
    }
    throw parameter_error("unknown widget family");
}

double widget_chi2_closed_form_reverse(const WidgetSpec& spec) {
    std::vector<double> logw, shift;
    switch (spec.family) {
        case WidgetFamily::CliqueWithHole: {
            require_spec(spec.d >= 3, "d >= 3");
            require_spec(spec.ell >= 2 && spec.ell <= spec.d - 1,
                         "2 <= ell <= d-1");
            require_spec(spec.mu != 0.0, "mu != 0");
            clique_hole_family(spec.d, spec.ell, spec.lambda, spec.mu, spec.mu,
                               logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
        case WidgetFamily::CliqueVsEmpty: {
            require_spec(spec.d >= 2, "d >= 2");
            require_spec(spec.mu != 0.0, "mu != 0");
            clique_family(spec.d, spec.mu, spec.mu, logw, shift);
            return log_linear_family_chi2(logw, shift);
        }
        default:
            throw parameter_error(std::string("no reverse closed form for ") +
                                  family_name(spec.family));
    }
}

} // namespace ising
