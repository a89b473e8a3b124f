#include "hccd/citest.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace hccd {

namespace {

constexpr double kRidge = 1e-9;
constexpr double kMaxAbsCorrelation = 1.0 - 1e-12;

void check_query(int vars, int x, int y, std::span<const int> z) {
    auto check = [vars](int v) {
        if (v < 0 || v >= vars) throw UnknownNode(std::to_string(v));
    };
    check(x);
    check(y);
    if (x == y) throw CiError("CI query needs two distinct variables");
    for (int v : z) {
        check(v);
        if (v == x || v == y) throw CiError("conditioning set contains a query endpoint");
    }
}

}  // namespace

Dataset::Dataset(std::vector<std::string> names, Eigen::MatrixXd values, DataKind kind,
                 std::vector<int> cardinalities)
    : names_(std::move(names)), values_(std::move(values)), kind_(kind),
      cardinalities_(std::move(cardinalities)) {
    if (static_cast<int>(names_.size()) != values_.cols())
        throw std::invalid_argument("dataset: name count does not match column count");
    if (values_.rows() < 1) throw std::invalid_argument("dataset: needs at least one sample");
    if (kind_ == DataKind::Continuous) {
        cardinalities_.clear();
        return;
    }
    if (cardinalities_.empty()) {
        cardinalities_.resize(names_.size());
        for (int j = 0; j < vars(); ++j)
            cardinalities_[j] = static_cast<int>(values_.col(j).maxCoeff()) + 1;
    }
    if (static_cast<int>(cardinalities_.size()) != vars())
        throw std::invalid_argument("dataset: cardinality count does not match column count");
    for (int j = 0; j < vars(); ++j) {
        for (int i = 0; i < samples(); ++i) {
            const double v = values_(i, j);
            if (v < 0 || v != std::floor(v) || v >= cardinalities_[j])
                throw std::invalid_argument("dataset: invalid discrete code in column " + names_[j]);
        }
    }
}

int Dataset::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw UnknownNode(name);
    return static_cast<int>(it - names_.begin());
}

std::vector<int> Dataset::codes(int var) const {
    std::vector<int> out(samples());
    for (int i = 0; i < samples(); ++i) out[i] = static_cast<int>(values_(i, var));
    return out;
}

Eigen::MatrixXd correlation_matrix(const Dataset& data) {
    const Eigen::MatrixXd& x = data.values();
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    const int p = data.vars();
    Eigen::MatrixXd corr(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i == j)
                corr(i, j) = 1.0;
            else if (sd(i) <= 0.0 || sd(j) <= 0.0)
                corr(i, j) = 0.0;
            else
                corr(i, j) = std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
        }
    }
    return corr;
}

double partial_correlation(const Eigen::MatrixXd& corr, int x, int y, std::span<const int> z) {
    if (z.empty()) return corr(x, y);
    const int k = static_cast<int>(z.size());
    Eigen::MatrixXd szz(k, k);
    Eigen::MatrixXd sza(k, 2);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) szz(i, j) = corr(z[i], z[j]);
        sza(i, 0) = corr(z[i], x);
        sza(i, 1) = corr(z[i], y);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(szz);
    if (llt.info() != Eigen::Success) {
        szz.diagonal().array() += kRidge;
        llt.compute(szz);
        if (llt.info() != Eigen::Success) throw SingularCovariance();
    }
    const Eigen::MatrixXd solved = llt.solve(sza);
    const Eigen::Matrix2d explained = sza.transpose() * solved;
    const double vxx = 1.0 - explained(0, 0);
    const double vyy = 1.0 - explained(1, 1);
    const double vxy = corr(x, y) - explained(0, 1);
    // x or y fully explained by z: no residual dependence left to measure.
    if (vxx <= 0.0 || vyy <= 0.0) return 0.0;
    return std::clamp(vxy / std::sqrt(vxx * vyy), -1.0, 1.0);
}

CiOutcome fisher_z_from_correlation(const Eigen::MatrixXd& corr, int samples, int x, int y,
                                    std::span<const int> z, double alpha) {
    check_query(static_cast<int>(corr.rows()), x, y, z);
    const int dof = samples - static_cast<int>(z.size()) - 3;
    if (dof <= 0) throw InsufficientSamples();
    const double r = std::clamp(partial_correlation(corr, x, y, z), -kMaxAbsCorrelation,
                                kMaxAbsCorrelation);
    const double stat = std::sqrt(static_cast<double>(dof)) * std::atanh(r);
    const double p = std::erfc(std::abs(stat) / std::sqrt(2.0));
    return {.independent = p >= alpha,
            .statistic = stat,
            .p_value = p,
            .condition_size = static_cast<int>(z.size())};
}

CiOutcome fisher_z_test(const Dataset& data, int x, int y, std::span<const int> z, double alpha) {
    if (data.kind() != DataKind::Continuous)
        throw DataKindMismatch("fisher-z test needs continuous data");
    return fisher_z_from_correlation(correlation_matrix(data), data.samples(), x, y, z, alpha);
}

namespace {

CiOutcome g2_on_columns(const std::vector<std::vector<int>>& cols, const std::vector<int>& cards,
                        int x, int y, std::span<const int> z, double alpha) {
    const auto& cx = cols[x];
    const auto& cy = cols[y];
    const int n = static_cast<int>(cx.size());
    const int rx = cards[x], ry = cards[y];
    CiOutcome out{.condition_size = static_cast<int>(z.size())};

    auto is_constant = [](const std::vector<int>& c) {
        return std::all_of(c.begin(), c.end(), [&](int v) { return v == c.front(); });
    };
    if (is_constant(cx) || is_constant(cy)) {
        out.independent = true;
        out.p_value = 1.0;
        out.degenerate = true;
        return out;
    }

    // Dense configuration ids for the conditioning set, built one variable at a
    // time so ids never exceed the sample count.
    std::vector<int> config(n, 0);
    int n_configs = 1;
    for (int v : z) {
        const int card = cards[v];
        std::unordered_map<long long, int> remap;
        for (int i = 0; i < n; ++i) {
            const long long key = static_cast<long long>(config[i]) * card + cols[v][i];
            auto [it, inserted] = remap.try_emplace(key, static_cast<int>(remap.size()));
            config[i] = it->second;
        }
        n_configs = static_cast<int>(remap.size());
    }

    const int cells = rx * ry;
    std::vector<int> counts(static_cast<std::size_t>(n_configs) * cells, 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(config[i]) * cells + cx[i] * ry + cy[i]];

    double g2 = 0.0;
    long long dof = 0;
    std::vector<int> row(rx), col(ry);
    for (int c = 0; c < n_configs; ++c) {
        const int* t = &counts[static_cast<std::size_t>(c) * cells];
        std::fill(row.begin(), row.end(), 0);
        std::fill(col.begin(), col.end(), 0);
        int total = 0;
        for (int i = 0; i < rx; ++i) {
            for (int j = 0; j < ry; ++j) {
                row[i] += t[i * ry + j];
                col[j] += t[i * ry + j];
                total += t[i * ry + j];
            }
        }
        if (total == 0) continue;
        for (int i = 0; i < rx; ++i) {
            for (int j = 0; j < ry; ++j) {
                const int nij = t[i * ry + j];
                if (nij == 0) continue;
                g2 += nij * std::log(static_cast<double>(nij) * total /
                                     (static_cast<double>(row[i]) * col[j]));
            }
        }
        const auto nonzero = [](const std::vector<int>& v) {
            return std::count_if(v.begin(), v.end(), [](int k) { return k > 0; });
        };
        dof += std::max<long long>(0, (nonzero(row) - 1) * (nonzero(col) - 1));
    }
    g2 *= 2.0;
    out.statistic = g2;
    out.p_value = dof == 0 ? 1.0
                           : boost::math::gamma_q(static_cast<double>(dof) / 2.0, std::max(0.0, g2) / 2.0);
    out.independent = out.p_value >= alpha;
    return out;
}

std::vector<std::vector<int>> all_codes(const Dataset& data) {
    std::vector<std::vector<int>> cols;
    cols.reserve(data.vars());
    for (int j = 0; j < data.vars(); ++j) cols.push_back(data.codes(j));
    return cols;
}

}  // namespace

CiOutcome g2_test(const Dataset& data, int x, int y, std::span<const int> z, double alpha) {
    if (data.kind() != DataKind::Discrete) throw DataKindMismatch("G2 test needs discrete data");
    check_query(data.vars(), x, y, z);
    return g2_on_columns(all_codes(data), data.cardinalities(), x, y, z, alpha);
}

CiOutcome oracle_test(const Dag& dag, int x, int y, std::span<const int> z) {
    const bool sep = d_separated(dag, x, y, z);
    return {.independent = sep,
            .statistic = 0.0,
            .p_value = sep ? 1.0 : 0.0,
            .condition_size = static_cast<int>(z.size())};
}

FisherZSource::FisherZSource(const Dataset& data, double alpha)
    : corr_(correlation_matrix(data)), samples_(data.samples()), alpha_(alpha) {
    if (data.kind() != DataKind::Continuous)
        throw DataKindMismatch("fisher-z test needs continuous data");
}

CiOutcome FisherZSource::test(int x, int y, std::span<const int> z) const {
    return fisher_z_from_correlation(corr_, samples_, x, y, z, alpha_);
}

G2Source::G2Source(const Dataset& data, double alpha)
    : columns_(all_codes(data)), cards_(data.cardinalities()), alpha_(alpha) {
    if (data.kind() != DataKind::Discrete) throw DataKindMismatch("G2 test needs discrete data");
}

CiOutcome G2Source::test(int x, int y, std::span<const int> z) const {
    check_query(static_cast<int>(columns_.size()), x, y, z);
    return g2_on_columns(columns_, cards_, x, y, z, alpha_);
}

CiOutcome OracleSource::test(int x, int y, std::span<const int> z) const {
    return oracle_test(dag_, x, y, z);
}

CiKey CiKey::make(int x, int y, std::span<const int> z) {
    CiKey key{std::min(x, y), std::max(x, y), NodeSet(z.begin(), z.end())};
    std::sort(key.z.begin(), key.z.end());
    return key;
}

std::size_t CiKeyHash::operator()(const CiKey& key) const noexcept {
    std::size_t h = std::hash<long long>{}((static_cast<long long>(key.a) << 32) ^ key.b);
    for (int v : key.z) h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

CiEngine::CiEngine(std::shared_ptr<const CiSource> source) : source_(std::move(source)) {
    if (!source_) throw std::invalid_argument("CiEngine needs a decision source");
}

CiOutcome CiEngine::query(int x, int y, std::span<const int> z) {
    CiKey key = CiKey::make(x, y, z);
    {
        std::lock_guard lock(mutex_);
        ++counters_.total_queries;
        counters_.max_condition_size = std::max(counters_.max_condition_size, static_cast<int>(z.size()));
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    CiOutcome outcome = source_->test(key.a, key.b, key.z);
    std::lock_guard lock(mutex_);
    auto [it, inserted] = cache_.emplace(std::move(key), outcome);
    if (inserted) ++counters_.unique_tests;
    return it->second;
}

CiCounters CiEngine::counters() const {
    std::lock_guard lock(mutex_);
    return counters_;
}

void CiEngine::merge_from(const CiEngine& other) {
    if (&other == this) return;
    std::scoped_lock lock(mutex_, other.mutex_);
    for (const auto& [key, outcome] : other.cache_) cache_.emplace(key, outcome);
    counters_.unique_tests = static_cast<long long>(cache_.size());
    counters_.total_queries += other.counters_.total_queries;
    counters_.max_condition_size =
        std::max(counters_.max_condition_size, other.counters_.max_condition_size);
}

double mutual_information(std::span<const int> x, int card_x, std::span<const int> y, int card_y) {
    const std::size_t n = x.size();
    std::vector<double> joint(static_cast<std::size_t>(card_x) * card_y, 0.0);
    std::vector<double> px(card_x, 0.0), py(card_y, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(x[i]) * card_y + y[i]] += 1.0;
        px[x[i]] += 1.0;
        py[y[i]] += 1.0;
    }
    double mi = 0.0;
    const double total = static_cast<double>(n);
    for (int i = 0; i < card_x; ++i) {
        for (int j = 0; j < card_y; ++j) {
            const double nij = joint[static_cast<std::size_t>(i) * card_y + j];
            if (nij > 0) mi += nij / total * std::log(nij * total / (px[i] * py[j]));
        }
    }
    return std::max(0.0, mi);
}

WeightMatrix pairwise_strength(const Dataset& data) {
    const int p = data.vars();
    WeightMatrix w = WeightMatrix::Zero(p, p);
    if (data.kind() == DataKind::Continuous) {
        w = correlation_matrix(data).cwiseAbs();
        w.diagonal().setZero();
        return w;
    }
    const auto cols = all_codes(data);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double mi =
                mutual_information(cols[i], data.cardinality(i), cols[j], data.cardinality(j));
            w(i, j) = w(j, i) = mi;
        }
    }
    return w;
}

bool is_valid_weight_matrix(const WeightMatrix& w, double tol) {
    if (w.rows() != w.cols()) return false;
    for (int i = 0; i < w.rows(); ++i) {
        if (std::abs(w(i, i)) > tol) return false;
        for (int j = 0; j < w.cols(); ++j) {
            if (!std::isfinite(w(i, j)) || w(i, j) < -tol) return false;
            if (std::abs(w(i, j) - w(j, i)) > tol) return false;
        }
    }
    return true;
}

}  // namespace hccd
