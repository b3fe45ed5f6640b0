#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srcrt {

/// Exact integer used for quotients and CRT products.
using Quotient = unsigned __int128;

std::string to_string(Quotient q);

/// Raised for malformed inputs: bad moduli, mismatched shapes, out-of-range residues.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// N x L matrix of real residues. Row i is an estimand slot, column l holds the
/// (unordered) observations taken modulo m_l.
class ResidueMatrix {
public:
    ResidueMatrix() = default;
    ResidueMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    /// Build from row-major nested lists; all rows must have equal length.
    static ResidueMatrix from_rows(const std::vector<std::vector<double>>& rows);
    /// Build from column lists (one list per modulus).
    static ResidueMatrix from_columns(const std::vector<std::vector<double>>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t l) { return values_[i * cols_ + l]; }
    double operator()(std::size_t i, std::size_t l) const { return values_[i * cols_ + l]; }

    std::vector<double> column(std::size_t l) const;
    std::vector<double> row(std::size_t i) const;
    /// Sub-matrix keeping only the listed columns, in the listed order.
    ResidueMatrix select_columns(std::span<const std::size_t> cols) const;

    bool operator==(const ResidueMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Raw observations R_il, one column per modulus.
using ObservationMatrix = ResidueMatrix;

/// One permutation per modulus: perms[l][i] is the row of column l assigned to estimand i.
struct Clustering {
    std::vector<std::vector<std::size_t>> perms;

    std::size_t n() const { return perms.empty() ? 0 : perms.front().size(); }
    std::size_t l() const { return perms.size(); }

    static Clustering identity(std::size_t n, std::size_t l);

    /// True iff every perms[l] is a bijection on {0..n-1}.
    bool valid() const;

    /// Relabel estimands so that perms[0] is the identity. Two clusterings that
    /// describe the same partition of observations have equal canonical forms.
    Clustering canonical() const;

    /// Gather the values assigned to estimand i, one per column.
    std::vector<double> gather(const ResidueMatrix& m, std::size_t i) const;

    bool operator==(const Clustering&) const = default;
};

/// Result of reconstructing one number.
struct Estimate {
    double y_hat = 0.0;
    Quotient quotient = 0;
    double mu_hat = 0.0;
};

}  // namespace srcrt
