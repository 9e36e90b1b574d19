#include "tsvf/twostate.hpp"

#include <cmath>

namespace tsvf {

TwoState::TwoState(StateVector history, StateVector destiny, double eps)
    : history_(std::move(history)), destiny_(std::move(destiny)), eps_(eps) {
    if (history_.layout() != destiny_.layout())
        throw std::invalid_argument("history and destiny layouts differ: " +
                                    history_.layout().describe() + " vs " +
                                    destiny_.layout().describe());
    if (history_.time() != destiny_.time())
        throw std::invalid_argument("history and destiny refer to different times");
    overlap_ = destiny_.amplitudes().dot(history_.amplitudes());  // <destiny|history>
    const double scale = history_.norm() * destiny_.norm();
    if (scale == 0.0 || std::abs(overlap_) / scale <= eps_)
        throw NearOrthogonalBoundaries(scale == 0.0 ? 0.0 : std::abs(overlap_) / scale);
}

TwoState make_two_state(StateVector history, StateVector destiny, double eps) {
    return {std::move(history), std::move(destiny), eps};
}

TwoStateMatrix::TwoStateMatrix(SubsystemLayout layout, Matrix entries, double time)
    : layout_(std::move(layout)), entries_(std::move(entries)), time_(time) {
    if (entries_.rows() != entries_.cols() || entries_.rows() != layout_.total_dim())
        throw std::invalid_argument("two-state matrix size does not match layout " +
                                    layout_.describe());
    const complex_t tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw std::invalid_argument("two-state matrix trace deviates from 1 by " +
                                    detail::fmt_g(std::abs(tr - 1.0)));
}

TwoStateMatrix matrix_form(const TwoState& ts) {
    Matrix m = ts.history().amplitudes() * ts.destiny().amplitudes().adjoint() / ts.overlap();
    return {ts.layout(), std::move(m), ts.time()};
}

TwoState evolve_two_state(const TwoState& ts, const Schedule& schedule) {
    StateVector h = evolve(ts.history(), schedule);
    StateVector d = evolve(ts.destiny(), schedule);
    return {std::move(h), std::move(d), ts.eps_orth()};
}

TwoStateMatrix reduce(const TwoState& ts, const std::vector<std::string>& keep) {
    auto [layout, m] = detail::partial_trace_outer(ts.layout(), ts.history().amplitudes(),
                                                   ts.destiny().amplitudes(), keep);
    m /= ts.overlap();
    return {std::move(layout), std::move(m), ts.time()};
}

TwoStateMatrix partial_trace(const TwoStateMatrix& m, const std::vector<std::string>& keep) {
    auto [layout, r] = detail::partial_trace_raw(m.layout(), m.entries(), keep);
    return {std::move(layout), std::move(r), m.time()};
}

DensityMatrix as_density_matrix(const TwoState& ts, double tol) {
    const double scale = ts.history().norm() * ts.destiny().norm();
    const double deviation = 1.0 - std::abs(ts.overlap()) / scale;
    if (deviation > tol) throw NotDensityLike(deviation);
    Vector psi = ts.history().amplitudes() / ts.history().norm();
    Matrix m = psi * psi.adjoint();
    return {ts.layout(), std::move(m)};
}

}  // namespace tsvf
