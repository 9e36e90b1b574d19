#include "tsvf/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tsvf {

namespace {

void check_eigensystem(const RealVector& values, const Matrix& vectors, Index dim) {
    if (values.size() != dim || vectors.rows() != dim || vectors.cols() != dim)
        throw std::invalid_argument("eigensystem must provide a complete basis for the layout");
    const double defect =
        (vectors.adjoint() * vectors - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw std::invalid_argument("eigenvectors are not orthonormal (defect " +
                                    detail::fmt_g(defect) + ")");
}

void check_reconstruction(const Matrix& op, const RealVector& values, const Matrix& vectors) {
    const Matrix rebuilt =
        vectors * values.cast<complex_t>().asDiagonal() * vectors.adjoint();
    const double defect = (rebuilt - op).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw std::invalid_argument("eigensystem does not reconstruct the operator (defect " +
                                    detail::fmt_g(defect) + ")");
}

void check_measured_state(const StateVector& psi, const ObservableSpec& obs, const char* name) {
    if (psi.layout() != obs.op.layout())
        throw std::invalid_argument(std::string(name) + " layout " + psi.layout().describe() +
                                    " does not match the observable's " +
                                    obs.op.layout().describe());
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-8) throw NormalizationError(name, n);
}

}  // namespace

ObservableSpec ObservableSpec::from_operator(const Operator& op) {
    if (!op.hermitian_flag()) {
        const double defect = (op.entries() - op.entries().adjoint()).cwiseAbs().maxCoeff();
        if (defect > 1e-10)
            throw std::invalid_argument("observable must be hermitian (defect " +
                                        detail::fmt_g(defect) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.entries());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of the observable failed");
    RealVector values = solver.eigenvalues();
    Matrix vectors = solver.eigenvectors();
    check_eigensystem(values, vectors, op.entries().rows());
    check_reconstruction(op.entries(), values, vectors);
    return {op, std::move(values), std::move(vectors)};
}

ObservableSpec ObservableSpec::from_eigensystem(SubsystemLayout layout, RealVector eigenvalues,
                                                Matrix eigenvectors) {
    check_eigensystem(eigenvalues, eigenvectors, layout.total_dim());
    Matrix built =
        eigenvectors * eigenvalues.cast<complex_t>().asDiagonal() * eigenvectors.adjoint();
    built = 0.5 * (built + built.adjoint().eval());  // symmetrize roundoff
    Operator op = Operator::hermitian(std::move(layout), std::move(built));
    check_reconstruction(op.entries(), eigenvalues, eigenvectors);
    return {std::move(op), std::move(eigenvalues), std::move(eigenvectors)};
}

ObservableSpec pauli_observable(char axis, const std::string& label) {
    SubsystemLayout layout = SubsystemLayout::qubits({label});
    RealVector values(2);
    values << 1.0, -1.0;
    Matrix vectors(2, 2);
    const double r = 1.0 / std::numbers::sqrt2;
    switch (axis) {
        case 'z': vectors << 1, 0, 0, 1; break;
        case 'x': vectors << r, r, r, -r; break;
        case 'y':
            vectors << complex_t(r, 0), complex_t(r, 0), complex_t(0, r), complex_t(0, -r);
            break;
        default: throw std::invalid_argument(std::string("unknown Pauli axis '") + axis + "'");
    }
    return ObservableSpec::from_eigensystem(std::move(layout), std::move(values),
                                            std::move(vectors));
}

RealVector born_probabilities(const StateVector& psi, const ObservableSpec& obs) {
    check_measured_state(psi, obs, "measured state");
    return (obs.eigenvectors.adjoint() * psi.amplitudes()).cwiseAbs2();
}

RealVector abl_probabilities(const StateVector& psi_i, const StateVector& psi_f,
                             const ObservableSpec& obs) {
    check_measured_state(psi_i, obs, "past boundary state");
    check_measured_state(psi_f, obs, "future boundary state");
    const RealVector from_past = (obs.eigenvectors.adjoint() * psi_i.amplitudes()).cwiseAbs2();
    const RealVector from_future = (obs.eigenvectors.adjoint() * psi_f.amplitudes()).cwiseAbs2();
    const RealVector terms = from_past.cwiseProduct(from_future);
    const double denom = terms.sum();
    if (denom <= 1e-14) throw ImpossibleBoundaryPair(denom);
    return terms / denom;
}

double expectation_value(const StateVector& psi, const ObservableSpec& obs) {
    check_measured_state(psi, obs, "measured state");
    const complex_t v = psi.amplitudes().dot(obs.op.entries() * psi.amplitudes());
    return v.real();
}

BoundaryAssignment assign_final_boundary(complex_t a, complex_t b, BoundaryMode mode,
                                         uint64_t seed, int fixed_state,
                                         const std::string& pointer_label) {
    const double total = std::norm(a) + std::norm(b);
    if (std::abs(total - 1.0) > 1e-10)
        throw NormalizationError("branch amplitudes (a, b)", std::sqrt(total));

    BoundaryAssignment out;
    out.pointer_label = pointer_label;
    out.mode = mode;
    out.rng_seed = seed;
    out.probabilities = RealVector(2);
    out.probabilities << std::norm(a), std::norm(b);

    if (mode == BoundaryMode::fixed) {
        if (fixed_state != 0 && fixed_state != 1)
            throw std::invalid_argument("fixed boundary state must be 0 or 1");
        out.chosen_state = fixed_state;
        return out;
    }
    DrawSource draws(seed);
    out.draw = draws.uniform01();
    out.stream_index = draws.stream_index();
    out.chosen_state = out.draw < out.probabilities[0] ? 0 : 1;
    return out;
}

namespace {

// Shared guards for the reduction helpers: the selected branch must carry
// weight on both boundaries.
void check_selection(const ToyModelConfig& cfg, const BoundaryAssignment& assignment, complex_t c,
                     complex_t d) {
    const double total = std::norm(c) + std::norm(d);
    if (std::abs(total - 1.0) > 1e-10)
        throw NormalizationError("future system state (c, d)", std::sqrt(total));
    if (assignment.chosen_state != 0 && assignment.chosen_state != 1)
        throw std::invalid_argument("boundary assignment must select state 0 or 1");
    const complex_t branch = assignment.chosen_state == 0 ? cfg.a : cfg.b;
    const complex_t phi_comp = assignment.chosen_state == 0 ? c : d;
    const double overlap = std::abs(branch) * std::abs(phi_comp);
    if (overlap <= kOrthogonalityEps) throw NearOrthogonalBoundaries(overlap);
}

// phi (x) |chosen pointer state> on layout {s, a} at the given time.
StateVector destiny_at_pointer(complex_t c, complex_t d, int chosen_state, double time) {
    Vector amps = Vector::Zero(4);
    amps[chosen_state] = c;       // |up, chosen>
    amps[2 + chosen_state] = d;   // |down, chosen>
    return {SubsystemLayout::qubits({kSystemLabel, kPointerLabel}), std::move(amps), time, false};
}

}  // namespace

TwoStateMatrix two_time_reduction(const ToyModelConfig& cfg, const BoundaryAssignment& assignment,
                                  complex_t c, complex_t d, double tau) {
    check_selection(cfg, assignment, c, d);
    if (!(tau >= 0.0)) throw std::invalid_argument("environment coupling time must be >= 0");

    StateVector history = couple_environment_dense(premeasure(cfg), cfg.env, tau);
    StateVector destiny = couple_environment_dense(
        destiny_at_pointer(c, d, assignment.chosen_state, cfg.t1()), cfg.env, tau);
    TwoState ts = make_two_state(std::move(history), std::move(destiny));
    return reduce(ts, {kSystemLabel, kPointerLabel});
}

double pointer_offdiag_ratio(const TwoStateMatrix& system_pointer, int chosen_state) {
    if (chosen_state != 0 && chosen_state != 1)
        throw std::invalid_argument("chosen pointer state must be 0 or 1");
    TwoStateMatrix pointer = partial_trace(system_pointer, {kPointerLabel});
    const double diag = std::abs(pointer.entries()(chosen_state, chosen_state));
    const double offdiag = std::abs(pointer.entries()(1 - chosen_state, chosen_state));
    if (diag < 1e-300)
        throw std::domain_error("selected pointer diagonal vanishes; ratio undefined");
    return offdiag / diag;
}

TwoStateMatrix backward_reduced_state(const ToyModelConfig& cfg,
                                      const BoundaryAssignment& assignment, complex_t c,
                                      complex_t d) {
    check_selection(cfg, assignment, c, d);

    SubsystemLayout layout = SubsystemLayout::qubits({kSystemLabel, kPointerLabel});
    const double r = 1.0 / std::numbers::sqrt2;
    Vector amps(4);
    amps << cfg.a * r, cfg.a * r, cfg.b * r, cfg.b * r;  // (a|u> + b|d>) (x) |R>
    StateVector history(std::move(layout), std::move(amps), 0.0, true);

    StateVector destiny = evolve(destiny_at_pointer(c, d, assignment.chosen_state, cfg.t1()),
                                 system_pointer_hamiltonian(cfg.g), -cfg.t1());
    TwoState ts = make_two_state(std::move(history), std::move(destiny));
    return reduce(ts, {kSystemLabel});
}

StateVector backward_system_state(const ToyModelConfig& cfg, const BoundaryAssignment& assignment,
                                  complex_t c, complex_t d) {
    TwoStateMatrix reduced = backward_reduced_state(cfg, assignment, c, d);
    Eigen::JacobiSVD<Matrix> svd(reduced.entries(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    if (!(sv[0] > 0.0)) throw NotDensityLike(1.0);
    const double relative_rank2 = sv[1] / sv[0];
    if (relative_rank2 > 1e-10) throw NotDensityLike(relative_rank2);

    Vector direction = svd.matrixV().col(0);
    Index peak = 0;
    direction.cwiseAbs().maxCoeff(&peak);
    const complex_t phase = direction[peak] / std::abs(direction[peak]);
    direction *= std::conj(phase);
    return {reduced.layout(), std::move(direction), reduced.time(), true};
}

SignalingResult signaling_demo(bool flip_left) {
    SubsystemLayout layout = SubsystemLayout::qubits({"L", "R"});
    const double r = 1.0 / std::numbers::sqrt2;

    Vector entangled = Vector::Zero(4);
    entangled[0] = r;  // |uu>
    entangled[3] = r;  // |dd>
    if (flip_left) {
        Vector flipped = Vector::Zero(4);
        flipped[2] = entangled[0];  // X on the left qubit: |uu> -> |du>
        flipped[3] = entangled[1];
        flipped[0] = entangled[2];
        flipped[1] = entangled[3];  // |dd> -> |ud>
        entangled = std::move(flipped);
    }
    StateVector past(layout, entangled, 0.0, true);

    Vector future_amps = Vector::Zero(4);
    future_amps[0] = r;  // |uu>
    future_amps[1] = r;  // |ud>
    StateVector future(layout, std::move(future_amps), 0.0, true);

    // Right-qubit z readout in the product basis: eigenvalue follows the
    // right bit of each basis vector.
    RealVector values(4);
    values << 1.0, -1.0, 1.0, -1.0;
    ObservableSpec right_z =
        ObservableSpec::from_eigensystem(layout, std::move(values), Matrix::Identity(4, 4));

    const RealVector with_future = abl_probabilities(past, future, right_z);
    // No free evolution between the boundaries, so the causal comparison pins
    // the future boundary to the preparation.
    const RealVector without_future = abl_probabilities(past, past, right_z);

    SignalingResult out;
    out.left_flipped = flip_left;
    out.p_up_right = with_future[0] + with_future[2];
    out.p_down_right = with_future[1] + with_future[3];
    out.causal_p_up_right = without_future[0] + without_future[2];
    out.causal_p_down_right = without_future[1] + without_future[3];
    out.note =
        "The conditional distribution shifts with the remote flip only for an agent who already "
        "holds the future boundary; without it the distribution stays at one half each, so no "
        "signal is transmitted.";
    return out;
}

}  // namespace tsvf
