#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ordcausal {

// Error taxonomy. Hard failures throw; recoverable non-convergence is a
// flag on the returned fit (see OrdinalFit::converged).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidArgument : Error { using Error::Error; };
struct RankDeficientDesign : Error { using Error::Error; };
struct SeparationDetected : Error { using Error::Error; };
struct InsufficientRows : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct EmptySupport : Error { using Error::Error; };
struct ConstantVector : Error { using Error::Error; };
struct EmptyCell : Error { using Error::Error; };
struct EmptyLevel : Error { using Error::Error; };
struct ZeroProbability : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct UnparseableValue : Error { using Error::Error; };
struct EmptyAfterFiltering : Error { using Error::Error; };

enum class ColumnType { numeric, ordinal, binary };

std::string to_string(ColumnType t);
ColumnType column_type_from_string(const std::string& s);

// Rectangular study table: covariate matrix x (n rows, p typed columns),
// ordinal treatment t in {1..n_levels}, outcome y, stable unit ids.
struct Dataset {
    std::vector<std::string> covariate_names;  // size p
    std::vector<ColumnType> covariate_types;   // size p
    std::vector<int> ids;                      // size n, unique
    Eigen::MatrixXd x;                         // n x p
    std::vector<int> t;                        // size n, values in 1..n_levels
    Eigen::VectorXd y;                         // size n
    int n_levels = 0;

    int n() const { return static_cast<int>(ids.size()); }
    int p() const { return static_cast<int>(covariate_names.size()); }

    // Throws InvalidArgument on violated invariants (arity mismatch,
    // n_levels < 2, treatment label outside 1..n_levels, duplicate ids).
    void validate() const;

    // Count of units at each level, indexed 0..n_levels-1.
    std::vector<int> level_counts() const;

    // Index of a covariate by name, or -1.
    int column_index(const std::string& name) const;

    // Row subset preserving ids and column metadata.
    Dataset subset(const std::vector<int>& rows) const;
};

// Column-index selection into Dataset::x.
using ColumnSelection = std::vector<int>;

// All columns of `data`, in order.
ColumnSelection all_columns(const Dataset& data);

// Matrix of the selected columns (n x |sel|).
Eigen::MatrixXd select_columns(const Dataset& data, const ColumnSelection& sel);

}  // namespace ordcausal
