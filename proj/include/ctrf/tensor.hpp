#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ctrf/error.hpp"

namespace ctrf {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

/// Dense row-major matrix. Row-major storage matches the tensor linearization,
/// so a matrix and an order-2 tensor of the same shape share their data layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

std::string to_string(const Shape& shape);
Index num_elements(const Shape& shape);

/**
 * N-dimensional array of doubles.
 *
 * Elements are stored with the first index varying slowest: element
 * (i_1, ..., i_N) lives at offset ((i_1 * I_2 + i_2) * I_3 + ...) + i_N.
 * Element indices are zero-based; mode numbers in the unfolding API below
 * are one-based, following the usual tensor notation.
 */
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    static DenseTensor filled(Shape shape, double value);
    /// Order-2 tensor holding the entries of `m`.
    static DenseTensor from_matrix(const Matrix& m);

    const Shape& shape() const noexcept { return shape_; }
    Index order() const noexcept { return static_cast<Index>(shape_.size()); }
    Index dim(Index k) const { return shape_.at(static_cast<std::size_t>(k)); }
    Index size() const noexcept { return static_cast<Index>(data_.size()); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double* raw() noexcept { return data_.data(); }
    const double* raw() const noexcept { return data_.data(); }

    Index offset(std::span<const Index> idx) const;
    double& at(std::span<const Index> idx) { return data_[static_cast<std::size_t>(offset(idx))]; }
    double at(std::span<const Index> idx) const { return data_[static_cast<std::size_t>(offset(idx))]; }
    double& at(std::initializer_list<Index> idx) { return at(std::span<const Index>(idx.begin(), idx.size())); }
    double at(std::initializer_list<Index> idx) const { return at(std::span<const Index>(idx.begin(), idx.size())); }

    /// Unchecked access for order-3 tensors.
    double& operator()(Index i, Index j, Index k) noexcept
    {
        return data_[static_cast<std::size_t>((i * shape_[1] + j) * shape_[2] + k)];
    }
    double operator()(Index i, Index j, Index k) const noexcept
    {
        return data_[static_cast<std::size_t>((i * shape_[1] + j) * shape_[2] + k)];
    }

    /// Same data, new shape with the same number of elements.
    DenseTensor reshaped(Shape shape) const&;
    DenseTensor reshaped(Shape shape) &&;

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double s);

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double s, DenseTensor a);

// ---------------------------------------------------------------------------
// Unfoldings. Column indices always enumerate the listed modes with the first
// listed mode varying fastest.

/// H_(n): rows I_n, columns modes 1..n-1, n+1..N in ascending order.
Matrix mode_n_unfold(const DenseTensor& t, Index mode);
/// H_<n>: rows I_n, columns modes n+1..N, 1..n-1 in cyclic order.
Matrix tr_unfold(const DenseTensor& t, Index mode);
/// H[I_1..I_split, I_split+1..I_N]: rows modes 1..split, columns the rest.
Matrix block_unfold(const DenseTensor& t, Index split);

/// Inverse of mode_n_unfold.
DenseTensor fold_n(const Matrix& m, const Shape& shape, Index mode);
/// Inverse of tr_unfold.
DenseTensor tr_fold(const Matrix& m, const Shape& shape, Index mode);
/// Inverse of block_unfold.
DenseTensor block_fold(const Matrix& m, const Shape& shape, Index split);

/// Rotates modes left by `shift`: shape (I_{s+1}, ..., I_N, I_1, ..., I_s).
DenseTensor circ_shift(const DenseTensor& t, Index shift);

// ---------------------------------------------------------------------------
// Products.

/// core ×_2 p for an order-3 core (R_a, I, R_b) and p (J × I).
DenseTensor mode2_ttm(const DenseTensor& core, const Matrix& p);
/// t ×_n p for any order; p has I_n columns.
DenseTensor mode_product(const DenseTensor& t, const Matrix& p, Index mode);

Matrix kron(const Matrix& a, const Matrix& b);

double inner(const DenseTensor& a, const DenseTensor& b);
double fro_norm(const DenseTensor& t);

}  // namespace ctrf
