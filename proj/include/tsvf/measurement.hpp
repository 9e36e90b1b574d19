#pragma once

#include <cstdint>
#include <string>

#include "tsvf/decoherence.hpp"
#include "tsvf/rng.hpp"
#include "tsvf/twostate.hpp"

// Ideal projective measurements with both boundary conditions in play: Born
// statistics forward, the two-boundary conditional rule when both a past and a
// future state are given, sampled assignment of the future boundary, and the
// reduced descriptions of the toy model between and after its measurements.

namespace tsvf {

// A complete eigensystem of a Hermitian observable.  Column k of
// `eigenvectors` is the (unit) eigenvector for `eigenvalues[k]`; the columns
// are orthonormal within 1e-10 and reconstruct the operator within 1e-10.
struct ObservableSpec {
    Operator op;
    RealVector eigenvalues;
    Matrix eigenvectors;

    static ObservableSpec from_operator(const Operator& op);
    static ObservableSpec from_eigensystem(SubsystemLayout layout, RealVector eigenvalues,
                                           Matrix eigenvectors);
};

// Single-qubit Pauli observable on the labelled qubit, eigenvalue +1 listed
// first.  `axis` is 'x', 'y' or 'z'.
ObservableSpec pauli_observable(char axis, const std::string& label);

enum class BoundaryMode { fixed, sampled };

// Full record of how a future boundary was chosen, sufficient to replay the
// choice bit-for-bit: generator seed, position in its draw stream, the
// uniform variate consumed, and the distribution it was tested against.
struct BoundaryAssignment {
    std::string pointer_label;
    int chosen_state = 0;  // 0 = pointer-up branch, 1 = pointer-down branch
    BoundaryMode mode = BoundaryMode::fixed;
    uint64_t rng_seed = 0;
    uint64_t stream_index = 0;  // 0 when no draw was consumed (fixed mode)
    double draw = -1.0;         // -1 when no draw was consumed (fixed mode)
    RealVector probabilities;
};

struct MeasurementRecord {
    int outcome = 0;
    StateVector pre_state;
    StateVector post_state;
    RealVector probabilities;
    BoundaryAssignment assignment;
};

// Forward-only outcome distribution |<a_k|psi>|^2.  psi must be normalized
// within 1e-8.
RealVector born_probabilities(const StateVector& psi, const ObservableSpec& obs);

// Conditional outcome distribution given both boundary states:
//   p(a_k) ∝ |<psi_f|a_k>|^2 |<a_k|psi_i>|^2.
// Throws ImpossibleBoundaryPair if the normalizing sum is <= 1e-14 (no
// outcome connects the two states).  Both states normalized within 1e-8.
RealVector abl_probabilities(const StateVector& psi_i, const StateVector& psi_f,
                             const ObservableSpec& obs);

double expectation_value(const StateVector& psi, const ObservableSpec& obs);

// Choose the pointer branch that the future boundary condition selects.
// |a|^2 + |b|^2 must equal 1 within 1e-10.  In sampled mode one uniform
// variate u is consumed and the up branch is chosen iff u < |a|^2; in fixed
// mode `fixed_state` is used and no randomness is touched.
BoundaryAssignment assign_final_boundary(complex_t a, complex_t b, BoundaryMode mode,
                                         uint64_t seed, int fixed_state = 0,
                                         const std::string& pointer_label = kPointerLabel);

// System+pointer two-boundary matrix at time t1 + tau, tau >= 0, for the toy
// model run with the given final assignment and future system state
// phi = c|up> + d|down>.  History: premeasurement then environment coupling
// for tau.  Destiny: (phi ⊗ chosen pointer state) dressed with the matching
// environment branch state at the same time.  The environment is traced out.
// Throws NearOrthogonalBoundaries if the selected branch amplitude or its
// overlap with phi is <= eps_orth.
TwoStateMatrix two_time_reduction(const ToyModelConfig& cfg, const BoundaryAssignment& assignment,
                                  complex_t c, complex_t d, double tau);

// Magnitude ratio of the surviving pointer off-diagonal to the selected
// diagonal in the pointer-reduced matrix: |<other|m_a|chosen>| / |<chosen|m_a|chosen>|
// with m_a the system-traced pointer matrix.  Decays as |z(tau)|.
double pointer_offdiag_ratio(const TwoStateMatrix& system_pointer, int chosen_state);

// System-only two-boundary matrix at t = 0: history (a,b) against the destiny
// evolved backwards through the premeasurement from (phi ⊗ chosen pointer
// state) at t1, pointer traced out.
TwoStateMatrix backward_reduced_state(const ToyModelConfig& cfg,
                                      const BoundaryAssignment& assignment, complex_t c,
                                      complex_t d);

// Direction of the pure backward-evolved system boundary hiding in the
// rank-one matrix above: its right singular vector, phase-fixed so the
// largest-magnitude component is real and positive.  Throws NotDensityLike if
// the matrix is not rank one within 1e-10 (relative second singular value).
StateVector backward_system_state(const ToyModelConfig& cfg, const BoundaryAssignment& assignment,
                                  complex_t c, complex_t d);

// Two qubits prepared in (|uu> + |dd>)/sqrt(2) with the future boundary
// (|uu> + |ud>)/sqrt(2); the right qubit's conditional distribution is
// computed from both, optionally after a flip of the left qubit.  The
// distribution responds to the remote flip -- usable for signaling only by an
// agent who already knows the future boundary.
struct SignalingResult {
    double p_up_right = 0;    // conditional on preparation and future boundary
    double p_down_right = 0;
    double causal_p_up_right = 0;   // future boundary = evolved preparation
    double causal_p_down_right = 0;
    bool left_flipped = false;
    std::string note;
};

SignalingResult signaling_demo(bool flip_left);

}  // namespace tsvf
