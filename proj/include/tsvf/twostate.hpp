#pragma once

#include "tsvf/qcore.hpp"

// The two-boundary state: a forward-evolving history ket paired with a
// backward-evolving destiny ket (stored as a ket; formulas take its bra).
// The normalized matrix form is |history><destiny| / <destiny|history>.
//
// Inner products are antilinear in the bra throughout: <x|y> = sum conj(x_i) y_i.

namespace tsvf {

class TwoState {
public:
    // Layouts and times must match; throws NearOrthogonalBoundaries when the
    // normalized overlap magnitude |<destiny|history>| / (|h||d|) is at or
    // below eps.  Vectors are stored unnormalized; division by the overlap
    // happens only in matrix form.
    TwoState(StateVector history, StateVector destiny, double eps = kOrthogonalityEps);

    const StateVector& history() const { return history_; }
    const StateVector& destiny() const { return destiny_; }
    complex_t overlap() const { return overlap_; }  // <destiny|history>, unnormalized vectors
    double time() const { return history_.time(); }
    const SubsystemLayout& layout() const { return history_.layout(); }
    double eps_orth() const { return eps_; }

private:
    StateVector history_;
    StateVector destiny_;
    complex_t overlap_;
    double eps_;
};

// Unit-trace, generally non-hermitian matrix over a layout.
class TwoStateMatrix {
public:
    TwoStateMatrix(SubsystemLayout layout, Matrix entries, double time = 0.0);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }
    double time() const { return time_; }

private:
    SubsystemLayout layout_;
    Matrix entries_;
    double time_;
};

TwoState make_two_state(StateVector history, StateVector destiny,
                        double eps = kOrthogonalityEps);

// Full-layout normalized matrix form.
TwoStateMatrix matrix_form(const TwoState& ts);

// Both boundary vectors evolved by the same schedule: the matrix picks up
// U ... U^dagger.  The overlap is recomputed (it is invariant under unitary
// evolution; tests pin this to 1e-12).
TwoState evolve_two_state(const TwoState& ts, const Schedule& schedule);

// Partial trace of the normalized matrix form over everything not kept.
// Computed directly from the boundary vectors, so the full outer product is
// never materialized.
TwoStateMatrix reduce(const TwoState& ts, const std::vector<std::string>& keep);

// Further reduction of an already-reduced matrix.
TwoStateMatrix partial_trace(const TwoStateMatrix& m, const std::vector<std::string>& keep);

// The density-matrix special case: requires destiny parallel to history
// (deviation 1 - |<d|h>|/(|d||h|) within tol), i.e. the destiny is the evolved
// history up to global phase.  Returns |psi><psi| for the normalized history.
DensityMatrix as_density_matrix(const TwoState& ts, double tol = 1e-10);

}  // namespace tsvf
