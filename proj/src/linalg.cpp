#include "chaoslab/linalg.hpp"

#include <algorithm>

#include "chaoslab/errors.hpp"

namespace chaoslab {

Matrix Matrix::identity(std::size_t n, double scale) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

void Matrix::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != cols || out.size() != rows) throw SpecificationError("Matrix::apply: dimension mismatch");
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += values[i * cols + j] * x[j];
        out[i] = s;
    }
}

bool Matrix::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

} // namespace chaoslab
