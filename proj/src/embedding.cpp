#include "dreg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dreg {

namespace {

int g_fast_path_mode = 0;  // 0 auto, 1 force on, -1 force off

void check_dims(const Bag& a, const Bag& b, const BaseKernelSpec& spec, const char* who) {
    if (a.dim() != spec.dim || b.dim() != spec.dim)
        throw input_error(std::string(who) + ": bag dimension does not match kernel spec");
    if (a.size() < 1 || b.size() < 1)
        throw input_error(std::string(who) + ": empty bag");
}

// Exact block sum: (1/(Na Nb)) sum_{i,j} G(a_i, b_j), tiled over rows of a.
double exact_pair_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const BaseKernelSpec& spec) {
    const Eigen::Index na = a.rows(), nb = b.rows();
    const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = b.rowwise().squaredNorm();
    const Eigen::Index tile = std::max<Eigen::Index>(1, (1 << 22) / std::max<Eigen::Index>(nb, 1));
    double total = 0.0;
    for (Eigen::Index r0 = 0; r0 < na; r0 += tile) {
        const Eigen::Index rows = std::min(tile, na - r0);
        Eigen::MatrixXd sq = (-2.0 * a.middleRows(r0, rows) * b.transpose());
        sq.colwise() += a2.segment(r0, rows);
        sq.rowwise() += b2.transpose();
        sq = sq.cwiseMax(0.0);
        if (spec.family == BaseFamily::gaussian) {
            total += (-sq.array() / (2.0 * spec.sigma * spec.sigma)).exp().sum();
        } else {
            total += (-sq.array().sqrt() / spec.sigma).exp().sum();
        }
    }
    return total / (static_cast<double>(na) * static_cast<double>(nb));
}

// ---------------------------------------------------------------------------
// Fast path for the 1-D gaussian base kernel.
//
// G(a,b) = exp(-(a-b)^2/2sigma^2) is entire, so on the bounding interval of
// the data it is reproduced to machine precision by barycentric interpolation
// at p Chebyshev nodes in each argument:
//   G(a,b) ~= sum_{k,l} l_k(a) F_{kl} l_l(b),   F_{kl} = G(t_k, t_l).
// The block sum over a bag pair then factors through per-bag moment vectors
// w[k] = (1/N) sum_i l_k(x_i), turning the whole Gram into two small GEMMs.
// This is a summation scheme, not a statistical approximation: p grows with
// the data range so the result matches the exact double loop to ~1e-13.
// ---------------------------------------------------------------------------

struct ChebyshevGrid {
    Eigen::VectorXd nodes;    // p
    Eigen::VectorXd weights;  // barycentric weights
    Eigen::MatrixXd node_kernel;

    ChebyshevGrid(double lo, double hi, int p, double sigma) {
        nodes.resize(p);
        weights.resize(p);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int k = 0; k < p; ++k) {
            nodes[k] = mid + half * std::cos(M_PI * k / (p - 1));
            weights[k] = (k % 2 == 0) ? 1.0 : -1.0;
        }
        weights[0] *= 0.5;
        weights[p - 1] *= 0.5;
        node_kernel.resize(p, p);
        for (int k = 0; k < p; ++k)
            for (int l = 0; l < p; ++l) {
                const double d = nodes[k] - nodes[l];
                node_kernel(k, l) = std::exp(-d * d / (2.0 * sigma * sigma));
            }
    }

    // Mean of the Lagrange basis over the bag's samples.
    Eigen::VectorXd moments(const Eigen::MatrixXd& samples) const {
        const int p = static_cast<int>(nodes.size());
        Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd term(p);
        for (Eigen::Index i = 0; i < samples.rows(); ++i) {
            const double x = samples(i, 0);
            bool at_node = false;
            double denom = 0.0;
            for (int k = 0; k < p; ++k) {
                const double d = x - nodes[k];
                if (d == 0.0) {
                    w[k] += 1.0;
                    at_node = true;
                    break;
                }
                term[k] = weights[k] / d;
                denom += term[k];
            }
            if (!at_node) w += term / denom;
        }
        return w / static_cast<double>(samples.rows());
    }
};

int node_count_for(double width, double sigma) {
    return std::min(1000, 33 + static_cast<int>(std::ceil(3.0 * width / sigma)));
}

bool fast_eligible(const BaseKernelSpec& spec, double pair_work, double width) {
    if (spec.dim != 1 || spec.family != BaseFamily::gaussian) return false;
    if (node_count_for(width, spec.sigma) >= 1000) return false;
    if (g_fast_path_mode == 1) return true;
    if (g_fast_path_mode == -1) return false;
    return pair_work > 5e7;
}

void sample_range(const std::vector<Bag>& bags, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& b : bags) {
        lo = std::min(lo, b.samples.minCoeff());
        hi = std::max(hi, b.samples.maxCoeff());
    }
    const double pad = std::max(1e-8, 1e-9 * std::max(std::abs(lo), std::abs(hi)));
    lo -= pad;
    hi += pad;
}

double total_samples(const std::vector<Bag>& bags) {
    double s = 0;
    for (const auto& b : bags) s += static_cast<double>(b.size());
    return s;
}

}  // namespace

namespace detail {
int chebyshev_node_count(double width, double sigma) { return node_count_for(width, sigma); }
void set_fast_path_mode(int mode) { g_fast_path_mode = mode; }
}  // namespace detail

double embed_inner(const Bag& a, const Bag& b, const BaseKernelSpec& spec) {
    check_dims(a, b, spec, "embed_inner");
    return exact_pair_inner(a.samples, b.samples, spec);
}

double embed_sq_dist(const Bag& a, const Bag& b, const BaseKernelSpec& spec) {
    const double d2 = embed_inner(a, a, spec) + embed_inner(b, b, spec) -
                      2.0 * embed_inner(a, b, spec);
    if (d2 < -1e-9)
        std::fprintf(stderr, "dreg: warning: squared embedding distance %.3e clamped to 0\n", d2);
    return std::max(d2, 0.0);
}

EmbeddingGram embedding_gram(const std::vector<Bag>& bags, const BaseKernelSpec& spec) {
    if (bags.empty()) throw input_error("embedding_gram: empty bag list");
    for (const auto& b : bags) check_dims(b, b, spec, "embedding_gram");
    const Eigen::Index n = static_cast<Eigen::Index>(bags.size());
    double lo, hi;
    const double s = total_samples(bags);
    EmbeddingGram eg;
    if (spec.dim == 1) {
        sample_range(bags, lo, hi);
        if (fast_eligible(spec, 0.5 * s * s, hi - lo)) {
            const int p = node_count_for(hi - lo, spec.sigma);
            ChebyshevGrid grid(lo, hi, p, spec.sigma);
            Eigen::MatrixXd w(n, p);
            for (Eigen::Index i = 0; i < n; ++i) w.row(i) = grid.moments(bags[i].samples);
            Eigen::MatrixXd g = w * grid.node_kernel * w.transpose();
            eg.inner = 0.5 * (g + g.transpose());
            return eg;
        }
    }
    eg.inner.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = exact_pair_inner(bags[i].samples, bags[j].samples, spec);
            eg.inner(i, j) = v;
            eg.inner(j, i) = v;
        }
    return eg;
}

Eigen::MatrixXd cross_inner_matrix(const std::vector<Bag>& a, const std::vector<Bag>& b,
                                   const BaseKernelSpec& spec) {
    if (a.empty() || b.empty()) throw input_error("cross_inner_matrix: empty bag list");
    for (const auto& bag : a) check_dims(bag, bag, spec, "cross_inner_matrix");
    for (const auto& bag : b) check_dims(bag, bag, spec, "cross_inner_matrix");
    const Eigen::Index m = static_cast<Eigen::Index>(a.size());
    const Eigen::Index n = static_cast<Eigen::Index>(b.size());
    if (spec.dim == 1) {
        double lo_a, hi_a, lo_b, hi_b;
        sample_range(a, lo_a, hi_a);
        sample_range(b, lo_b, hi_b);
        const double lo = std::min(lo_a, lo_b), hi = std::max(hi_a, hi_b);
        if (fast_eligible(spec, total_samples(a) * total_samples(b), hi - lo)) {
            const int p = node_count_for(hi - lo, spec.sigma);
            ChebyshevGrid grid(lo, hi, p, spec.sigma);
            Eigen::MatrixXd wa(m, p), wb(n, p);
            for (Eigen::Index i = 0; i < m; ++i) wa.row(i) = grid.moments(a[i].samples);
            for (Eigen::Index j = 0; j < n; ++j) wb.row(j) = grid.moments(b[j].samples);
            return wa * grid.node_kernel * wb.transpose();
        }
    }
    Eigen::MatrixXd c(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            c(i, j) = exact_pair_inner(a[i].samples, b[j].samples, spec);
    return c;
}

Eigen::VectorXd self_inner(const std::vector<Bag>& bags, const BaseKernelSpec& spec) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(bags.size()));
    for (std::size_t i = 0; i < bags.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = embed_inner(bags[i], bags[i], spec);
    return v;
}

OuterGram outer_gram(const EmbeddingGram& eg, const OuterKernelSpec& spec) {
    const Eigen::Index n = eg.n();
    OuterGram og;
    og.spec = spec;
    og.k.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v =
                outer_eval_from_geometry(spec, eg.inner(i, j), eg.inner(i, i), eg.inner(j, j));
            og.k(i, j) = v;
            og.k(j, i) = v;
        }
    return og;
}

double analytic_gauss_inner(const GaussianParams& p, const GaussianParams& q, double sigma) {
    if (!(sigma > 0.0) || !(p.std > 0.0) || !(q.std > 0.0))
        throw input_error("analytic_gauss_inner: scales must be positive");
    const double v = sigma * sigma + p.std * p.std + q.std * q.std;
    const double dm = p.mean - q.mean;
    return sigma / std::sqrt(v) * std::exp(-dm * dm / (2.0 * v));
}

double analytic_gauss_cross(double x, const GaussianParams& p, double sigma) {
    if (!(sigma > 0.0) || !(p.std > 0.0))
        throw input_error("analytic_gauss_cross: scales must be positive");
    const double v = sigma * sigma + p.std * p.std;
    const double d = x - p.mean;
    return sigma / std::sqrt(v) * std::exp(-d * d / (2.0 * v));
}

double bag_population_inner(const Bag& bag, const GaussianParams& p, double sigma) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < bag.size(); ++i)
        s += analytic_gauss_cross(bag.samples(i, 0), p, sigma);
    return s / static_cast<double>(bag.size());
}

EmbeddingGram population_embedding_gram(const std::vector<GaussianParams>& params, double sigma) {
    const Eigen::Index n = static_cast<Eigen::Index>(params.size());
    if (n == 0) throw input_error("population_embedding_gram: empty parameter list");
    EmbeddingGram eg;
    eg.inner.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = analytic_gauss_inner(params[i], params[j], sigma);
            eg.inner(i, j) = v;
            eg.inner(j, i) = v;
        }
    return eg;
}

Eigen::MatrixXd population_cross_inner(const std::vector<GaussianParams>& a,
                                       const std::vector<GaussianParams>& b, double sigma) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                analytic_gauss_inner(a[i], b[j], sigma);
    return c;
}

}  // namespace dreg
