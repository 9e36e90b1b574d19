#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tsvf/errors.hpp"

// Core linear algebra over labeled tensor-product spaces.
//
// Units: hbar = 1 throughout the library, so exp(-i H t) carries no constant
// and times are measured in inverse energy.
//
// Basis conventions: within each two-level factor, index 0 is the "up"-type
// state and index 1 the "down"-type state.  Flat indices follow the layout
// order with the leftmost factor slowest (Kronecker convention), i.e. for a
// layout [A, B] the flat index is i_A * dim_B + i_B.

namespace tsvf {

using complex_t = std::complex<double>;
using Matrix = Eigen::MatrixXcd;  // dense, column-major
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kOrthogonalityEps = 1e-10;

struct Subsystem {
    std::string label;
    Index dim;
};

// Ordered list of labeled finite-dimensional factors.  Labels are unique and
// every dimension is at least 2.
class SubsystemLayout {
public:
    SubsystemLayout() = default;
    explicit SubsystemLayout(std::vector<Subsystem> factors);

    // Convenience: n two-level factors with the given labels.
    static SubsystemLayout qubits(const std::vector<std::string>& labels);

    const std::vector<Subsystem>& factors() const { return factors_; }
    Index size() const { return static_cast<Index>(factors_.size()); }
    Index total_dim() const { return total_dim_; }

    bool contains(const std::string& label) const;
    Index position_of(const std::string& label) const;  // throws on unknown label
    Index dim_at(Index pos) const { return factors_[pos].dim; }
    // Stride of factor `pos` in the flat index (product of dims to its right).
    Index stride_at(Index pos) const { return strides_[pos]; }

    // Sub-layout of the given labels, kept in this layout's order.
    SubsystemLayout sublayout(const std::vector<std::string>& labels) const;

    bool operator==(const SubsystemLayout& other) const;
    bool operator!=(const SubsystemLayout& other) const { return !(*this == other); }

    std::string describe() const;  // "s(2) x a(2) x e1(2)" for error messages

private:
    std::vector<Subsystem> factors_;
    std::vector<Index> strides_;
    Index total_dim_ = 1;
};

// A ket with its layout and the time it refers to.  The `normalized` flag is
// verified at construction (norm within 1e-12 of one).
class StateVector {
public:
    StateVector(SubsystemLayout layout, Vector amplitudes, double time = 0.0,
                bool normalized = false);

    const SubsystemLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    double time() const { return time_; }
    bool normalized() const { return normalized_; }
    double norm() const { return amplitudes_.norm(); }
    Index dim() const { return amplitudes_.size(); }

    StateVector with_time(double t) const { return {layout_, amplitudes_, t, normalized_}; }

private:
    SubsystemLayout layout_;
    Vector amplitudes_;
    double time_;
    bool normalized_;
};

// Square matrix acting on a layout.  The hermitian/unitary flags are verified
// when set through the checked factories.
class Operator {
public:
    Operator(SubsystemLayout layout, Matrix entries);

    static Operator hermitian(SubsystemLayout layout, Matrix entries);
    static Operator unitary(SubsystemLayout layout, Matrix entries);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }
    bool hermitian_flag() const { return hermitian_; }
    bool unitary_flag() const { return unitary_; }

private:
    SubsystemLayout layout_;
    Matrix entries_;
    bool hermitian_ = false;
    bool unitary_ = false;
};

// Hermitian, unit-trace, positive-semidefinite matrix; all three properties
// are verified at construction (hermitian/trace to 1e-12, eigenvalues above
// -1e-10).
class DensityMatrix {
public:
    DensityMatrix(SubsystemLayout layout, Matrix entries);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }

private:
    SubsystemLayout layout_;
    Matrix entries_;
};

// --- construction helpers ----------------------------------------------------

// Kronecker products; layouts must be label-disjoint.
StateVector tensor_product(const StateVector& a, const StateVector& b);
Operator tensor_product(const Operator& a, const Operator& b);

Matrix kron(const Matrix& a, const Matrix& b);

// Pauli matrices in the up/down basis (index 0 = up).
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();

enum class PauliAxis { y, z };

// Closed-form 2x2 unitary exp(i c sigma_axis):
//   z: diag(e^{ic}, e^{-ic})      y: ((cos c, sin c), (-sin c, cos c))
Matrix exp_i_sigma(PauliAxis axis, double c);

// --- partial trace -----------------------------------------------------------

// Trace out every factor not in `keep`; the reduced layout preserves the
// original factor order.  Trace is preserved.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

namespace detail {
// Raw partial trace on a bare matrix over `layout`.
std::pair<SubsystemLayout, Matrix> partial_trace_raw(const SubsystemLayout& layout,
                                                     const Matrix& m,
                                                     const std::vector<std::string>& keep);
// Partial trace of the outer product |x><y| without materializing it:
// reduced[i,j] = sum_e x[(i,e)] * conj(y[(j,e)]).
std::pair<SubsystemLayout, Matrix> partial_trace_outer(const SubsystemLayout& layout,
                                                       const Vector& x, const Vector& y,
                                                       const std::vector<std::string>& keep);
}  // namespace detail

// --- evolution ---------------------------------------------------------------

// exp(-i h dt) through an eigendecomposition of the hermitian h; the result is
// verified unitary to 1e-12.
Operator evolution_operator(const Operator& h, double dt);

// Single piecewise-constant step: U(dt) psi, time advanced by dt (dt may be
// negative for backward evolution).  Norm is preserved to 1e-12.
StateVector evolve(const StateVector& psi, const Operator& h, double dt);

using Schedule = std::vector<std::pair<Operator, double>>;
StateVector evolve(const StateVector& psi, const Schedule& schedule);

// Lift an operator onto a larger layout (identity on the extra factors).  The
// operator's labels may sit anywhere in the target order.
Operator embed(const Operator& op, const SubsystemLayout& target);

}  // namespace tsvf
