#pragma once

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hccd/graph.hpp"

namespace hccd {

class CiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularCovariance : public CiError {
public:
    SingularCovariance() : CiError("conditioning correlation submatrix is singular") {}
};

class InsufficientSamples : public CiError {
public:
    InsufficientSamples() : CiError("too few samples for the conditioning set size") {}
};

class DataKindMismatch : public CiError {
public:
    using CiError::CiError;
};

enum class DataKind { Continuous, Discrete };

/// Column-named sample matrix (rows are samples). Discrete data stores
/// integer codes as doubles, each below its column's cardinality.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> names, Eigen::MatrixXd values, DataKind kind,
            std::vector<int> cardinalities = {});

    const std::vector<std::string>& names() const { return names_; }
    DataKind kind() const { return kind_; }
    int samples() const { return static_cast<int>(values_.rows()); }
    int vars() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    int cardinality(int var) const { return cardinalities_.at(var); }
    const std::vector<int>& cardinalities() const { return cardinalities_; }
    int index_of(const std::string& name) const;

    /// Integer codes of one discrete column.
    std::vector<int> codes(int var) const;

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
    DataKind kind_ = DataKind::Continuous;
    std::vector<int> cardinalities_;
};

struct CiOutcome {
    bool independent = false;
    double statistic = 0.0;
    double p_value = 0.0;
    int condition_size = 0;
    /// Set when x or y is constant (discrete test only).
    bool degenerate = false;

    bool operator==(const CiOutcome&) const = default;
};

inline constexpr double kDefaultAlpha = 0.01;

/// Pearson correlation matrix; constant columns get zero off-diagonal entries.
Eigen::MatrixXd correlation_matrix(const Dataset& data);

/// Partial correlation of (x,y) given z from a correlation matrix. Retries once
/// with a 1e-9 ridge on the conditioning block before throwing SingularCovariance.
double partial_correlation(const Eigen::MatrixXd& corr, int x, int y, std::span<const int> z);

CiOutcome fisher_z_from_correlation(const Eigen::MatrixXd& corr, int samples, int x, int y,
                                    std::span<const int> z, double alpha);
CiOutcome fisher_z_test(const Dataset& data, int x, int y, std::span<const int> z, double alpha);
CiOutcome g2_test(const Dataset& data, int x, int y, std::span<const int> z, double alpha);
CiOutcome oracle_test(const Dag& dag, int x, int y, std::span<const int> z);

/// A conditional-independence decision procedure over integer variable ids.
class CiSource {
public:
    virtual ~CiSource() = default;
    virtual CiOutcome test(int x, int y, std::span<const int> z) const = 0;
    virtual std::string name() const = 0;
};

class FisherZSource final : public CiSource {
public:
    FisherZSource(const Dataset& data, double alpha);
    CiOutcome test(int x, int y, std::span<const int> z) const override;
    std::string name() const override { return "fisher-z"; }

private:
    Eigen::MatrixXd corr_;
    int samples_;
    double alpha_;
};

class G2Source final : public CiSource {
public:
    G2Source(const Dataset& data, double alpha);
    CiOutcome test(int x, int y, std::span<const int> z) const override;
    std::string name() const override { return "g2"; }

private:
    std::vector<std::vector<int>> columns_;
    std::vector<int> cards_;
    double alpha_;
};

class OracleSource final : public CiSource {
public:
    explicit OracleSource(Dag dag) : dag_(std::move(dag)) {}
    CiOutcome test(int x, int y, std::span<const int> z) const override;
    std::string name() const override { return "oracle"; }
    const Dag& dag() const { return dag_; }

private:
    Dag dag_;
};

/// Order-insensitive in the pair, set-valued in the condition.
struct CiKey {
    int a = 0;
    int b = 0;
    NodeSet z;

    static CiKey make(int x, int y, std::span<const int> z);
    bool operator==(const CiKey&) const = default;
};

struct CiKeyHash {
    std::size_t operator()(const CiKey& key) const noexcept;
};

struct CiCounters {
    long long unique_tests = 0;
    long long total_queries = 0;
    int max_condition_size = 0;
};

/// Caching, counting front-end over a CiSource. Thread-safe.
class CiEngine {
public:
    explicit CiEngine(std::shared_ptr<const CiSource> source);

    CiOutcome query(int x, int y, std::span<const int> z);
    CiCounters counters() const;
    const CiSource& source() const { return *source_; }

    /// Union of caches, sum of total queries.
    void merge_from(const CiEngine& other);

private:
    std::shared_ptr<const CiSource> source_;
    mutable std::mutex mutex_;
    std::unordered_map<CiKey, CiOutcome, CiKeyHash> cache_;
    CiCounters counters_;
};

/// Symmetric, non-negative, zero-diagonal pairwise strength matrix.
using WeightMatrix = Eigen::MatrixXd;

/// |Pearson correlation| for continuous data, plug-in mutual information (nats)
/// for discrete data.
WeightMatrix pairwise_strength(const Dataset& data);

/// Plug-in mutual information between two discrete columns, in nats.
double mutual_information(std::span<const int> x, int card_x, std::span<const int> y, int card_y);

bool is_valid_weight_matrix(const WeightMatrix& w, double tol = 1e-12);

}  // namespace hccd
