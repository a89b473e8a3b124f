#include "hccd/spectral.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace hccd {

namespace {

constexpr int kRestarts = 10;
constexpr int kMaxIterations = 100;

Partition normalize(std::vector<NodeSet> clusters) {
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::erase_if(clusters, [](const NodeSet& c) { return c.empty(); });
    std::sort(clusters.begin(), clusters.end(),
              [](const NodeSet& a, const NodeSet& b) { return a.front() < b.front(); });
    return clusters;
}

struct KmeansRun {
    std::vector<int> label;
    double sse = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& pts, int k, std::mt19937_64& rng) {
    const int n = static_cast<int>(pts.rows());
    Eigen::MatrixXd centers(k, pts.cols());

    std::uniform_int_distribution<int> pick(0, n - 1);
    centers.row(0) = pts.row(pick(rng));
    Eigen::VectorXd d2(n);
    for (int i = 0; i < n; ++i) d2(i) = (pts.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        int chosen = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            chosen = n - 1;
            for (int i = 0; i < n; ++i) {
                r -= d2(i);
                if (r < 0 && d2(i) > 0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(c) = pts.row(chosen);
        for (int i = 0; i < n; ++i)
            d2(i) = std::min(d2(i), (pts.row(i) - centers.row(c)).squaredNorm());
    }

    KmeansRun run;
    run.label.assign(n, -1);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (pts.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.label[i] != best) {
                run.label[i] = best;
                changed = true;
            }
        }
        // Empty clusters take the point farthest from its centre, drawn from a
        // cluster that can spare one.
        std::vector<int> sizes(k, 0);
        for (int l : run.label) ++sizes[l];
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[run.label[i]] < 2) continue;
                const double d = (pts.row(i) - centers.row(run.label[i])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --sizes[run.label[far]];
            run.label[far] = c;
            sizes[c] = 1;
            centers.row(c) = pts.row(far);
            changed = true;
        }
        centers.setZero();
        for (int i = 0; i < n; ++i) centers.row(run.label[i]) += pts.row(i);
        for (int c = 0; c < k; ++c) centers.row(c) /= sizes[c];
        if (!changed) break;
    }
    run.sse = 0.0;
    for (int i = 0; i < n; ++i) run.sse += (pts.row(i) - centers.row(run.label[i])).squaredNorm();
    return run;
}

WeightMatrix restrict(const WeightMatrix& w, const NodeSet& idx) {
    const int m = static_cast<int>(idx.size());
    WeightMatrix out(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = w(idx[i], idx[j]);
    return out;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

LaplacianPair degree_laplacian(const WeightMatrix& w) {
    LaplacianPair lp;
    lp.degree = w.rowwise().sum();
    lp.laplacian = -w;
    lp.laplacian.diagonal() += lp.degree;
    return lp;
}

SpectralEmbedding generalized_eigendecomposition(const LaplacianPair& lp, int m) {
    const int n = static_cast<int>(lp.degree.size());
    if (m < 0 || m > n) throw std::invalid_argument("embedding dimension out of range");
    if ((lp.degree.array() <= 0.0).any())
        throw SpectralError("generalized eigenproblem needs positive degrees");
    const Eigen::VectorXd inv_sqrt = lp.degree.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd normalized = inv_sqrt.asDiagonal() * lp.laplacian * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized);
    if (solver.info() != Eigen::Success) throw EigenFailure();
    SpectralEmbedding out;
    out.eigenvalues = solver.eigenvalues();
    out.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(m);
    return out;
}

int count_near_zero(const Eigen::VectorXd& eigenvalues, double tau) {
    return static_cast<int>((eigenvalues.array() < tau).count());
}

Partition kmeans_pp(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k > n) throw std::invalid_argument("k-means needs 1 <= k <= n");
    if (k == 1) {
        NodeSet all(n);
        std::iota(all.begin(), all.end(), 0);
        return {all};
    }
    if (k == n) {
        Partition singles;
        for (int i = 0; i < n; ++i) singles.push_back({i});
        return singles;
    }
    KmeansRun best;
    for (int r = 0; r < kRestarts; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        KmeansRun run = kmeans_once(points, k, rng);
        if (run.sse < best.sse) best = std::move(run);
    }
    std::vector<NodeSet> clusters(k);
    for (int i = 0; i < n; ++i) clusters[best.label[i]].push_back(i);
    return normalize(std::move(clusters));
}

double ncut_value(const WeightMatrix& w, const Partition& p) {
    const int n = static_cast<int>(w.rows());
    std::vector<int> owner(n, -1);
    for (std::size_t c = 0; c < p.size(); ++c) {
        for (int v : p[c]) {
            if (v < 0 || v >= n || owner[v] != -1)
                throw std::invalid_argument("ncut: not a partition of the index set");
            owner[v] = static_cast<int>(c);
        }
    }
    if (std::count(owner.begin(), owner.end(), -1) != 0)
        throw std::invalid_argument("ncut: partition does not cover the index set");
    double total = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        double cut = 0.0, assoc = 0.0;
        for (int i : p[c]) {
            for (int j = 0; j < n; ++j) {
                assoc += w(i, j);
                if (owner[j] != static_cast<int>(c)) cut += w(i, j);
            }
        }
        if (assoc > 0.0) total += cut / assoc;
    }
    return total;
}

ClusterStep cluster_once(const WeightMatrix& w, const ClusterOptions& options, std::uint64_t seed) {
    const int n = static_cast<int>(w.rows());
    ClusterStep step;
    NodeSet all(n);
    std::iota(all.begin(), all.end(), 0);
    if (n < 2) {
        step.partition = {all};
        return step;
    }

    NodeSet connected, isolated;
    const Eigen::VectorXd degree = w.rowwise().sum();
    for (int i = 0; i < n; ++i) (degree(i) > 0.0 ? connected : isolated).push_back(i);

    int k_connected = connected.empty() ? 0 : 1;
    Eigen::MatrixXd embedding_source;
    SpectralEmbedding emb;
    if (connected.size() >= 2) {
        const WeightMatrix sub = restrict(w, connected);
        const LaplacianPair lp = degree_laplacian(sub);
        const int m = static_cast<int>(connected.size());
        emb = generalized_eigendecomposition(lp, m);
        step.eigenvalues = emb.eigenvalues;
        k_connected = options.forced_k
                          ? std::max(1, *options.forced_k - static_cast<int>(isolated.size()))
                          : count_near_zero(emb.eigenvalues, options.tau);
        const int cap = options.cap_half ? std::max(1, m / 2) : m;
        k_connected = std::clamp(k_connected, 1, cap);
    }

    std::vector<NodeSet> clusters;
    for (int v : isolated) clusters.push_back({v});
    if (k_connected >= 2) {
        const Eigen::MatrixXd points = emb.vectors.leftCols(k_connected);
        for (const auto& local : kmeans_pp(points, k_connected, seed)) {
            NodeSet mapped;
            for (int i : local) mapped.push_back(connected[i]);
            clusters.push_back(std::move(mapped));
        }
    } else if (!connected.empty()) {
        clusters.push_back(connected);
    }

    if (clusters.size() <= 1) {
        step.k = 1;
        step.partition = {all};
        return step;
    }
    step.partition = normalize(std::move(clusters));
    step.k = static_cast<int>(step.partition.size());
    return step;
}

}  // namespace hccd
