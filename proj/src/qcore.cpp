#include "tsvf/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tsvf {

// --- SubsystemLayout ---------------------------------------------------------

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.label.empty())
            throw std::invalid_argument("subsystem label must be nonempty");
        if (!seen.insert(f.label).second)
            throw std::invalid_argument("duplicate subsystem label: " + f.label);
        if (f.dim < 2)
            throw std::invalid_argument("subsystem " + f.label + " has dimension < 2");
    }
    strides_.assign(factors_.size(), 1);
    for (Index p = static_cast<Index>(factors_.size()) - 1; p >= 0; --p) {
        if (p + 1 < static_cast<Index>(factors_.size()))
            strides_[p] = strides_[p + 1] * factors_[p + 1].dim;
        total_dim_ *= factors_[p].dim;
    }
}

SubsystemLayout SubsystemLayout::qubits(const std::vector<std::string>& labels) {
    std::vector<Subsystem> fs;
    fs.reserve(labels.size());
    for (const auto& l : labels) fs.push_back({l, 2});
    return SubsystemLayout(std::move(fs));
}

bool SubsystemLayout::contains(const std::string& label) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const Subsystem& f) { return f.label == label; });
}

Index SubsystemLayout::position_of(const std::string& label) const {
    for (Index p = 0; p < size(); ++p)
        if (factors_[p].label == label) return p;
    throw std::invalid_argument("unknown subsystem label: " + label);
}

SubsystemLayout SubsystemLayout::sublayout(const std::vector<std::string>& labels) const {
    std::set<std::string> want(labels.begin(), labels.end());
    if (want.size() != labels.size())
        throw std::invalid_argument("duplicate label in subsystem selection");
    std::vector<Subsystem> fs;
    for (const auto& f : factors_)
        if (want.count(f.label)) fs.push_back(f);
    if (fs.size() != want.size())
        for (const auto& l : labels) (void)position_of(l);  // raise on the unknown one
    return SubsystemLayout(std::move(fs));
}

bool SubsystemLayout::operator==(const SubsystemLayout& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != other.factors_[i].label || factors_[i].dim != other.factors_[i].dim)
            return false;
    return true;
}

std::string SubsystemLayout::describe() const {
    std::string out;
    for (const auto& f : factors_) {
        if (!out.empty()) out += " x ";
        out += f.label + "(" + std::to_string(f.dim) + ")";
    }
    return out.empty() ? "<empty>" : out;
}

// --- StateVector -------------------------------------------------------------

StateVector::StateVector(SubsystemLayout layout, Vector amplitudes, double time, bool normalized)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)), time_(time),
      normalized_(normalized) {
    if (amplitudes_.size() != layout_.total_dim())
        throw std::invalid_argument("amplitude count " + std::to_string(amplitudes_.size()) +
                                    " does not match layout " + layout_.describe());
    if (!amplitudes_.allFinite())
        throw std::invalid_argument("state amplitudes must be finite");
    if (normalized_) {
        const double n = amplitudes_.norm();
        if (std::abs(n - 1.0) > 1e-12)
            throw NormalizationError("StateVector.amplitudes", n);
    }
}

// --- Operator ----------------------------------------------------------------

namespace {
void check_square(const SubsystemLayout& layout, const Matrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("operator matrix must be square");
    if (m.rows() != layout.total_dim())
        throw std::invalid_argument("operator size " + std::to_string(m.rows()) +
                                    " does not match layout " + layout.describe());
}

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Matrix& m) {
    Matrix g = m.adjoint() * m;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}
}  // namespace

Operator::Operator(SubsystemLayout layout, Matrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
    check_square(layout_, entries_);
}

Operator Operator::hermitian(SubsystemLayout layout, Matrix entries) {
    Operator op(std::move(layout), std::move(entries));
    const double defect = hermiticity_defect(op.entries_);
    if (defect > kHermitianTol)
        throw std::invalid_argument("hermitian flag rejected: defect " + detail::fmt_g(defect));
    op.hermitian_ = true;
    return op;
}

Operator Operator::unitary(SubsystemLayout layout, Matrix entries) {
    Operator op(std::move(layout), std::move(entries));
    const double defect = unitarity_defect(op.entries_);
    if (defect > kUnitaryTol)
        throw std::invalid_argument("unitary flag rejected: defect " + detail::fmt_g(defect));
    op.unitary_ = true;
    return op;
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix::DensityMatrix(SubsystemLayout layout, Matrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
    check_square(layout_, entries_);
    const double herm = hermiticity_defect(entries_);
    if (herm > kHermitianTol)
        throw std::invalid_argument("density matrix not hermitian: defect " + detail::fmt_g(herm));
    const complex_t tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw std::invalid_argument("density matrix trace " + detail::fmt_g(std::abs(tr)) +
                                    " is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < kEigenvalueFloor)
        throw std::invalid_argument("density matrix has negative eigenvalue " + detail::fmt_g(lo));
}

// --- tensor products ---------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

namespace {
SubsystemLayout concat_disjoint(const SubsystemLayout& a, const SubsystemLayout& b) {
    for (const auto& f : b.factors())
        if (a.contains(f.label))
            throw std::invalid_argument("label collision in tensor product: " + f.label);
    std::vector<Subsystem> fs = a.factors();
    fs.insert(fs.end(), b.factors().begin(), b.factors().end());
    return SubsystemLayout(std::move(fs));
}
}  // namespace

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    SubsystemLayout layout = concat_disjoint(a.layout(), b.layout());
    if (a.time() != b.time())
        throw std::invalid_argument("tensor product of states at different times");
    Vector amps(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i)
        amps.segment(i * b.dim(), b.dim()) = a.amplitudes()[i] * b.amplitudes();
    return {std::move(layout), std::move(amps), a.time(), a.normalized() && b.normalized()};
}

Operator tensor_product(const Operator& a, const Operator& b) {
    SubsystemLayout layout = concat_disjoint(a.layout(), b.layout());
    Matrix m = kron(a.entries(), b.entries());
    if (a.hermitian_flag() && b.hermitian_flag())
        return Operator::hermitian(std::move(layout), std::move(m));
    if (a.unitary_flag() && b.unitary_flag())
        return Operator::unitary(std::move(layout), std::move(m));
    return {std::move(layout), std::move(m)};
}

// --- Pauli and closed-form exponentials --------------------------------------

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, complex_t(0, -1), complex_t(0, 1), 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix exp_i_sigma(PauliAxis axis, double c) {
    Matrix m(2, 2);
    if (axis == PauliAxis::z) {
        m << std::polar(1.0, c), 0, 0, std::polar(1.0, -c);
    } else {
        const double co = std::cos(c), si = std::sin(c);
        m << co, si, -si, co;
    }
    return m;
}

// --- partial trace -----------------------------------------------------------

namespace detail {

namespace {
// Flat-index offsets spanned by the digits of the selected factor positions,
// enumerated leftmost-slowest so the ordering matches the reduced layout.
std::vector<Index> offsets_for(const SubsystemLayout& layout, const std::vector<Index>& positions) {
    std::vector<Index> offs{0};
    for (Index p : positions) {
        std::vector<Index> next;
        next.reserve(offs.size() * layout.dim_at(p));
        for (Index base : offs)
            for (Index d = 0; d < layout.dim_at(p); ++d)
                next.push_back(base + d * layout.stride_at(p));
        offs = std::move(next);
    }
    return offs;
}

struct TraceSplit {
    std::vector<Index> keep_offsets;
    std::vector<Index> drop_offsets;
    SubsystemLayout reduced;
};

TraceSplit split_for_trace(const SubsystemLayout& layout, const std::vector<std::string>& keep) {
    if (keep.empty())
        throw std::invalid_argument("partial trace must keep at least one subsystem");
    std::set<Index> keep_pos;
    for (const auto& l : keep)
        if (!keep_pos.insert(layout.position_of(l)).second)
            throw std::invalid_argument("duplicate label in keep set: " + l);
    std::vector<Index> kp(keep_pos.begin(), keep_pos.end()), dp;
    for (Index p = 0; p < layout.size(); ++p)
        if (!keep_pos.count(p)) dp.push_back(p);
    std::vector<Subsystem> fs;
    for (Index p : kp) fs.push_back(layout.factors()[p]);
    return {offsets_for(layout, kp), offsets_for(layout, dp), SubsystemLayout(std::move(fs))};
}
}  // namespace

std::pair<SubsystemLayout, Matrix> partial_trace_raw(const SubsystemLayout& layout, const Matrix& m,
                                                     const std::vector<std::string>& keep) {
    check_square(layout, m);
    TraceSplit sp = split_for_trace(layout, keep);
    const auto n = static_cast<Index>(sp.keep_offsets.size());
    Matrix out = Matrix::Zero(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            complex_t sum = 0;
            for (Index e : sp.drop_offsets)
                sum += m(sp.keep_offsets[a] + e, sp.keep_offsets[b] + e);
            out(a, b) = sum;
        }
    return {std::move(sp.reduced), std::move(out)};
}

std::pair<SubsystemLayout, Matrix> partial_trace_outer(const SubsystemLayout& layout,
                                                       const Vector& x, const Vector& y,
                                                       const std::vector<std::string>& keep) {
    if (x.size() != layout.total_dim() || y.size() != layout.total_dim())
        throw std::invalid_argument("vector size does not match layout in partial trace");
    TraceSplit sp = split_for_trace(layout, keep);
    const auto n = static_cast<Index>(sp.keep_offsets.size());
    Matrix out = Matrix::Zero(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            complex_t sum = 0;
            for (Index e : sp.drop_offsets)
                sum += x[sp.keep_offsets[a] + e] * std::conj(y[sp.keep_offsets[b] + e]);
            out(a, b) = sum;
        }
    return {std::move(sp.reduced), std::move(out)};
}

}  // namespace detail

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    auto [layout, m] = detail::partial_trace_raw(rho.layout(), rho.entries(), keep);
    return {std::move(layout), std::move(m)};
}

// --- evolution ---------------------------------------------------------------

Operator evolution_operator(const Operator& h, double dt) {
    const double defect = hermiticity_defect(h.entries());
    if (defect > kHermitianTol)
        throw std::invalid_argument("evolution requires a hermitian generator; defect " +
                                    detail::fmt_g(defect));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.entries());
    Vector phases(es.eigenvalues().size());
    for (Index i = 0; i < phases.size(); ++i)
        phases[i] = std::polar(1.0, -es.eigenvalues()[i] * dt);
    Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return Operator::unitary(h.layout(), std::move(u));
}

StateVector evolve(const StateVector& psi, const Operator& h, double dt) {
    if (psi.layout() != h.layout())
        throw std::invalid_argument("state layout " + psi.layout().describe() +
                                    " does not match generator layout " + h.layout().describe());
    Operator u = evolution_operator(h, dt);
    return {psi.layout(), u.entries() * psi.amplitudes(), psi.time() + dt, psi.normalized()};
}

StateVector evolve(const StateVector& psi, const Schedule& schedule) {
    StateVector out = psi;
    for (const auto& [h, dt] : schedule) out = evolve(out, h, dt);
    return out;
}

// --- embedding ---------------------------------------------------------------

Operator embed(const Operator& op, const SubsystemLayout& target) {
    std::vector<Index> positions;
    positions.reserve(op.layout().size());
    for (const auto& f : op.layout().factors()) {
        const Index p = target.position_of(f.label);
        if (target.dim_at(p) != f.dim)
            throw std::invalid_argument("dimension mismatch embedding subsystem " + f.label);
        positions.push_back(p);
    }
    // Offsets of the op's own flat index inside the target flat index.
    std::vector<Index> small_off{0};
    for (Index p : positions) {
        std::vector<Index> next;
        next.reserve(small_off.size() * target.dim_at(p));
        for (Index base : small_off)
            for (Index d = 0; d < target.dim_at(p); ++d)
                next.push_back(base + d * target.stride_at(p));
        small_off = std::move(next);
    }
    std::vector<Index> rest_off{0};
    {
        std::set<Index> used(positions.begin(), positions.end());
        for (Index p = 0; p < target.size(); ++p) {
            if (used.count(p)) continue;
            std::vector<Index> next;
            next.reserve(rest_off.size() * target.dim_at(p));
            for (Index base : rest_off)
                for (Index d = 0; d < target.dim_at(p); ++d)
                    next.push_back(base + d * target.stride_at(p));
            rest_off = std::move(next);
        }
    }
    const Index n = op.layout().total_dim();
    Matrix out = Matrix::Zero(target.total_dim(), target.total_dim());
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const complex_t v = op.entries()(i, j);
            if (v == complex_t(0, 0)) continue;
            for (Index e : rest_off) out(small_off[i] + e, small_off[j] + e) = v;
        }
    if (op.hermitian_flag()) return Operator::hermitian(target, std::move(out));
    if (op.unitary_flag()) return Operator::unitary(target, std::move(out));
    return {target, std::move(out)};
}

}  // namespace tsvf
