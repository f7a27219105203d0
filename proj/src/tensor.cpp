#include "ctrf/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ctrf/kernels.hpp"

namespace ctrf {

std::string to_string(const Shape& shape)
{
    std::ostringstream os;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k) os << 'x';
        os << shape[k];
    }
    return os.str();
}

Index num_elements(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

namespace {

void check_shape(const Shape& shape)
{
    if (shape.empty()) throw ShapeError("tensor order must be at least 1");
    for (Index d : shape)
        if (d < 1) throw ShapeError("tensor dimensions must be positive, got " + to_string(shape));
}

void check_mode(const DenseTensor& t, Index mode)
{
    if (mode < 1 || mode > t.order())
        throw ShapeError("mode " + std::to_string(mode) + " out of range for order-" +
                         std::to_string(t.order()) + " tensor");
}

void check_same_shape(const DenseTensor& a, const DenseTensor& b, const char* what)
{
    if (a.shape() != b.shape())
        throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
}

// Strides placing each source mode into an (rows × cols) row-major matrix, where
// `row_modes` and `col_modes` list zero-based modes with the first varying fastest.
std::vector<Index> matrix_strides(const Shape& shape, const std::vector<Index>& row_modes,
                                  const std::vector<Index>& col_modes, Index cols)
{
    std::vector<Index> strides(shape.size(), 0);
    Index w = 1;
    for (Index k : row_modes) {
        strides[static_cast<std::size_t>(k)] = w * cols;
        w *= shape[static_cast<std::size_t>(k)];
    }
    w = 1;
    for (Index k : col_modes) {
        strides[static_cast<std::size_t>(k)] = w;
        w *= shape[static_cast<std::size_t>(k)];
    }
    return strides;
}

Index product_of(const Shape& shape, const std::vector<Index>& modes)
{
    Index p = 1;
    for (Index k : modes) p *= shape[static_cast<std::size_t>(k)];
    return p;
}

struct Layout {
    std::vector<Index> row_modes;
    std::vector<Index> col_modes;
};

Layout mode_n_layout(Index order, Index mode)
{
    Layout l;
    l.row_modes = {mode - 1};
    for (Index k = 0; k < order; ++k)
        if (k != mode - 1) l.col_modes.push_back(k);
    return l;
}

Layout tr_layout(Index order, Index mode)
{
    Layout l;
    l.row_modes = {mode - 1};
    for (Index s = 1; s < order; ++s) l.col_modes.push_back((mode - 1 + s) % order);
    return l;
}

Layout block_layout(Index order, Index split)
{
    Layout l;
    for (Index k = 0; k < split; ++k) l.row_modes.push_back(k);
    for (Index k = split; k < order; ++k) l.col_modes.push_back(k);
    return l;
}

Matrix unfold_with(const DenseTensor& t, const Layout& l)
{
    const Index rows = product_of(t.shape(), l.row_modes);
    const Index cols = product_of(t.shape(), l.col_modes);
    Matrix m(rows, cols);
    const auto strides = matrix_strides(t.shape(), l.row_modes, l.col_modes, cols);
    kernels::scatter(t.data(), t.shape(), std::span<double>(m.data(), static_cast<std::size_t>(m.size())),
                     strides);
    return m;
}

DenseTensor fold_with(const Matrix& m, const Shape& shape, const Layout& l)
{
    const Index rows = product_of(shape, l.row_modes);
    const Index cols = product_of(shape, l.col_modes);
    if (m.rows() != rows || m.cols() != cols)
        throw ShapeError("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " inconsistent with shape " + to_string(shape));
    DenseTensor t(shape);
    const auto strides = matrix_strides(shape, l.row_modes, l.col_modes, cols);
    kernels::gather(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())), strides, t.data(),
                    shape);
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape))
{
    check_shape(shape_);
    data_.assign(static_cast<std::size_t>(num_elements(shape_)), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data))
{
    check_shape(shape_);
    if (static_cast<Index>(data_.size()) != num_elements(shape_))
        throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                         to_string(shape_));
}

DenseTensor DenseTensor::filled(Shape shape, double value)
{
    DenseTensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

DenseTensor DenseTensor::from_matrix(const Matrix& m)
{
    return DenseTensor({m.rows(), m.cols()}, std::vector<double>(m.data(), m.data() + m.size()));
}

Index DenseTensor::offset(std::span<const Index> idx) const
{
    if (static_cast<Index>(idx.size()) != order())
        throw ShapeError("index of length " + std::to_string(idx.size()) + " for order-" +
                         std::to_string(order()) + " tensor");
    Index off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape_[k])
            throw ShapeError("index out of range for shape " + to_string(shape_));
        off = off * shape_[k] + idx[k];
    }
    return off;
}

DenseTensor DenseTensor::reshaped(Shape shape) const&
{
    return DenseTensor(*this).reshaped(std::move(shape));
}

DenseTensor DenseTensor::reshaped(Shape shape) &&
{
    check_shape(shape);
    if (num_elements(shape) != size())
        throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    shape_ = std::move(shape);
    return std::move(*this);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other)
{
    check_same_shape(*this, other, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other)
{
    check_same_shape(*this, other, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double s)
{
    for (double& v : data_) v *= s;
    return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

// ---------------------------------------------------------------------------

Matrix mode_n_unfold(const DenseTensor& t, Index mode)
{
    check_mode(t, mode);
    return unfold_with(t, mode_n_layout(t.order(), mode));
}

Matrix tr_unfold(const DenseTensor& t, Index mode)
{
    check_mode(t, mode);
    return unfold_with(t, tr_layout(t.order(), mode));
}

Matrix block_unfold(const DenseTensor& t, Index split)
{
    if (split < 1 || split > t.order() - 1)
        throw ShapeError("block_unfold: split " + std::to_string(split) + " out of range for order " +
                         std::to_string(t.order()));
    return unfold_with(t, block_layout(t.order(), split));
}

DenseTensor fold_n(const Matrix& m, const Shape& shape, Index mode)
{
    check_shape(shape);
    if (mode < 1 || mode > static_cast<Index>(shape.size())) throw ShapeError("fold_n: mode out of range");
    return fold_with(m, shape, mode_n_layout(static_cast<Index>(shape.size()), mode));
}

DenseTensor tr_fold(const Matrix& m, const Shape& shape, Index mode)
{
    check_shape(shape);
    if (mode < 1 || mode > static_cast<Index>(shape.size())) throw ShapeError("tr_fold: mode out of range");
    return fold_with(m, shape, tr_layout(static_cast<Index>(shape.size()), mode));
}

DenseTensor block_fold(const Matrix& m, const Shape& shape, Index split)
{
    check_shape(shape);
    if (split < 1 || split > static_cast<Index>(shape.size()) - 1) throw ShapeError("block_fold: split out of range");
    return fold_with(m, shape, block_layout(static_cast<Index>(shape.size()), split));
}

DenseTensor circ_shift(const DenseTensor& t, Index shift)
{
    const Index n = t.order();
    if (shift < 0 || shift >= n)
        throw ShapeError("circ_shift: shift " + std::to_string(shift) + " out of range for order " +
                         std::to_string(n));
    if (shift == 0) return t;
    Shape out_shape(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) out_shape[static_cast<std::size_t>(k)] = t.dim((k + shift) % n);
    std::vector<Index> out_strides(static_cast<std::size_t>(n));
    Index w = 1;
    for (Index k = n - 1; k >= 0; --k) {
        out_strides[static_cast<std::size_t>(k)] = w;
        w *= out_shape[static_cast<std::size_t>(k)];
    }
    // Source mode k sits at output position (k - shift) mod n.
    std::vector<Index> strides(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k)
        strides[static_cast<std::size_t>(k)] = out_strides[static_cast<std::size_t>((k - shift + n) % n)];
    DenseTensor out(out_shape);
    kernels::scatter(t.data(), t.shape(), out.data(), strides);
    return out;
}

DenseTensor mode2_ttm(const DenseTensor& core, const Matrix& p)
{
    if (core.order() != 3) throw ShapeError("mode2_ttm expects an order-3 core");
    if (p.cols() != core.dim(1))
        throw ShapeError("mode2_ttm: operator has " + std::to_string(p.cols()) + " columns, core middle dim is " +
                         std::to_string(core.dim(1)));
    DenseTensor out({core.dim(0), p.rows(), core.dim(2)});
    kernels::slice_gemm(core.raw(), core.dim(0), core.dim(1), core.dim(2), p, out.raw());
    return out;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& p, Index mode)
{
    check_mode(t, mode);
    const auto k = static_cast<std::size_t>(mode - 1);
    Index pre = 1, post = 1;
    for (std::size_t j = 0; j < k; ++j) pre *= t.shape()[j];
    for (std::size_t j = k + 1; j < t.shape().size(); ++j) post *= t.shape()[j];
    if (p.cols() != t.shape()[k])
        throw ShapeError("mode_product: operator has " + std::to_string(p.cols()) + " columns, mode " +
                         std::to_string(mode) + " has size " + std::to_string(t.shape()[k]));
    Shape out_shape = t.shape();
    out_shape[k] = p.rows();
    DenseTensor out(out_shape);
    kernels::slice_gemm(t.raw(), pre, t.shape()[k], post, p, out.raw());
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double inner(const DenseTensor& a, const DenseTensor& b)
{
    check_same_shape(a, b, "inner");
    return kernels::dot(a.data(), b.data());
}

double fro_norm(const DenseTensor& t) { return std::sqrt(kernels::dot(t.data(), t.data())); }

}  // namespace ctrf
