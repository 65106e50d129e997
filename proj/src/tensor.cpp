#include "wqed/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed::tn {
namespace {

std::size_t product(const Shape& s, std::size_t from = 0, std::size_t to = SIZE_MAX) {
    to = std::min(to, s.size());
    std::size_t p = 1;
    for (std::size_t i = from; i < to; ++i) p *= s[i];
    return p;
}

std::string shape_str(const Shape& s) { return fmt::format("({})", fmt::join(s, ", ")); }

bool all_finite(const Eigen::MatrixXcd& m) {
    return m.array().isFinite().all();
}

enum class Absorb { Left, Right };

struct RawSplit {
    Eigen::MatrixXcd u;  // rows x k
    Eigen::MatrixXcd vh; // k x cols
    std::vector<double> s;
    double error{0.0};
    bool chi_limited{false};
};

// SVD with truncation and a deterministic phase convention: the first
// non-negligible entry of every left singular vector is real and positive.
// The singular values are multiplied into `vh` (Absorb::Right) or `u`.
RawSplit svd_truncate(const Eigen::MatrixXcd& m, const TruncationPolicy& policy, Absorb absorb) {
    if (!all_finite(m))
        throw SvdFailure(fmt::format("non-finite entries in {}x{} matrix", m.rows(), m.cols()));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite())
        throw SvdFailure(fmt::format("decomposition of {}x{} matrix did not converge (norm {:.3e})",
                                     m.rows(), m.cols(), m.norm()));
    const Eigen::VectorXd& sv = svd.singularValues();
    const auto n = static_cast<std::size_t>(sv.size());
    const double smax = n ? sv[0] : 0.0;
    std::size_t above = 0;
    while (above < n && sv[static_cast<Eigen::Index>(above)] > 0.0 &&
           sv[static_cast<Eigen::Index>(above)] >= policy.svd_cutoff * smax)
        ++above;
    std::size_t keep = std::min(above, std::max<std::size_t>(policy.chi_max, 1));
    keep = std::max<std::size_t>(keep, 1);
    keep = std::min(keep, std::max<std::size_t>(n, 1));

    RawSplit out;
    out.chi_limited = above > keep;
    double discarded = 0.0;
    for (std::size_t i = keep; i < n; ++i) discarded += sv[static_cast<Eigen::Index>(i)] * sv[static_cast<Eigen::Index>(i)];
    out.error = std::sqrt(discarded);

    const auto k = static_cast<Eigen::Index>(keep);
    if (n == 0) {
        out.u = Eigen::MatrixXcd::Zero(m.rows(), 1);
        out.vh = Eigen::MatrixXcd::Zero(1, m.cols());
        if (m.rows() > 0) out.u(0, 0) = 1.0;
        out.s = {0.0};
        return out;
    }
    out.u = svd.matrixU().leftCols(k);
    out.vh = svd.matrixV().leftCols(k).adjoint();
    for (Eigen::Index c = 0; c < k; ++c) {
        auto col = out.u.col(c);
        const double scale = col.cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            const double a = std::abs(col[r]);
            if (a > 1e-12 * scale) {
                const cd phase = std::conj(col[r]) / a;
                col *= phase;
                out.vh.row(c) *= std::conj(phase);
                break;
            }
        }
        out.s.push_back(sv[c]);
    }
    if (absorb == Absorb::Right)
        out.vh = sv.head(k).cast<cd>().asDiagonal() * out.vh;
    else
        out.u = out.u * sv.head(k).cast<cd>().asDiagonal();
    return out;
}

Tensor from_matrix(const Eigen::MatrixXcd& m, Shape shape) {
    return Tensor(std::move(shape), std::vector<cd>(m.data(), m.data() + m.size()));
}

void require_site(const Mps& state, std::size_t i, const char* what) {
    if (i >= state.size())
        throw SiteOutOfRange(fmt::format("{}: site {} outside chain of {}", what, i, state.size()));
}

} // namespace

// ---------------------------------------------------------------- Tensor

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(product(shape_), cd{0.0}) {}

Tensor::Tensor(Shape shape, std::vector<cd> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != product(shape_))
        throw ShapeMismatch(fmt::format("{} values for shape {}", data_.size(), shape_str(shape_)));
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size())
        throw ShapeMismatch(fmt::format("rank-{} index into rank-{} tensor", index.size(), shape_.size()));
    std::size_t off = 0, stride = 1, axis = 0;
    for (std::size_t i : index) {
        if (i >= shape_[axis])
            throw ShapeMismatch(fmt::format("index {} out of range on axis {} (dim {})", i, axis, shape_[axis]));
        off += i * stride;
        stride *= shape_[axis++];
    }
    return off;
}

cd& Tensor::operator()(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
cd Tensor::operator()(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

Tensor Tensor::permuted(std::initializer_list<std::size_t> perm) const {
    const std::vector<std::size_t> p(perm);
    return permuted(std::span<const std::size_t>(p));
}

Tensor Tensor::permuted(std::span<const std::size_t> perm) const {
    const std::size_t r = rank();
    if (perm.size() != r) throw ShapeMismatch("permutation length differs from rank");
    std::vector<bool> seen(r, false);
    for (std::size_t a : perm) {
        if (a >= r || seen[a]) throw ShapeMismatch("invalid axis permutation");
        seen[a] = true;
    }
    if (std::is_sorted(perm.begin(), perm.end())) return *this;

    Shape out_shape(r);
    std::vector<std::size_t> src_stride(r), stride(r);
    for (std::size_t a = 0, s = 1; a < r; ++a) {
        src_stride[a] = s;
        s *= shape_[a];
    }
    for (std::size_t i = 0; i < r; ++i) {
        out_shape[i] = shape_[perm[i]];
        stride[i] = src_stride[perm[i]];
    }
    Tensor out(out_shape);
    if (out.size() == 0) return out;
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    const std::size_t n0 = out_shape[0], s0 = stride[0];
    for (std::size_t lin = 0; lin < out.size(); lin += n0) {
        for (std::size_t i = 0; i < n0; ++i) out.data_[lin + i] = data_[src + i * s0];
        for (std::size_t a = 1; a < r; ++a) {
            src += stride[a];
            if (++idx[a] < out_shape[a]) break;
            src -= stride[a] * out_shape[a];
            idx[a] = 0;
        }
    }
    return out;
}

Tensor Tensor::reshaped(Shape shape) const {
    if (product(shape) != size())
        throw ShapeMismatch(fmt::format("cannot reshape {} into {}", shape_str(shape_), shape_str(shape)));
    return Tensor(std::move(shape), data_);
}

Eigen::Map<Eigen::MatrixXcd> Tensor::matrix(std::size_t row_axes) {
    return {data_.data(), static_cast<Eigen::Index>(product(shape_, 0, row_axes)),
            static_cast<Eigen::Index>(product(shape_, row_axes))};
}

Eigen::Map<const Eigen::MatrixXcd> Tensor::matrix(std::size_t row_axes) const {
    return {data_.data(), static_cast<Eigen::Index>(product(shape_, 0, row_axes)),
            static_cast<Eigen::Index>(product(shape_, row_axes))};
}

double Tensor::norm() const {
    double s = 0.0;
    for (const cd& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

Tensor Tensor::conj() const {
    Tensor out = *this;
    for (cd& v : out.data_) v = std::conj(v);
    return out;
}

Tensor contract(const Tensor& a, std::initializer_list<std::size_t> axes_a, const Tensor& b,
                std::initializer_list<std::size_t> axes_b) {
    const std::vector<std::size_t> va(axes_a), vb(axes_b);
    return contract(a, std::span<const std::size_t>(va), b, std::span<const std::size_t>(vb));
}

Tensor contract(const Tensor& a, std::span<const std::size_t> axes_a, const Tensor& b,
                std::span<const std::size_t> axes_b) {
    if (axes_a.size() != axes_b.size())
        throw ShapeMismatch("different numbers of contracted axes");
    for (std::size_t i = 0; i < axes_a.size(); ++i) {
        if (axes_a[i] >= a.rank() || axes_b[i] >= b.rank())
            throw ShapeMismatch("contracted axis out of range");
        if (a.dim(axes_a[i]) != b.dim(axes_b[i]))
            throw ShapeMismatch(fmt::format("axis {} of {} paired with axis {} of {}", axes_a[i],
                                            shape_str(a.shape()), axes_b[i], shape_str(b.shape())));
    }
    auto free_axes = [](std::size_t rank, std::span<const std::size_t> used) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < rank; ++i)
            if (std::find(used.begin(), used.end(), i) == used.end()) out.push_back(i);
        if (out.size() + used.size() != rank) throw ShapeMismatch("repeated contracted axis");
        return out;
    };
    const auto fa = free_axes(a.rank(), axes_a);
    const auto fb = free_axes(b.rank(), axes_b);

    std::vector<std::size_t> pa(fa), pb(axes_b.begin(), axes_b.end());
    pa.insert(pa.end(), axes_a.begin(), axes_a.end());
    pb.insert(pb.end(), fb.begin(), fb.end());
    const Tensor ta = a.permuted(pa);
    const Tensor tb = b.permuted(pb);

    Shape out_shape;
    for (std::size_t i : fa) out_shape.push_back(a.dim(i));
    for (std::size_t i : fb) out_shape.push_back(b.dim(i));
    Tensor out(out_shape);
    out.matrix(fa.size()).noalias() = ta.matrix(fa.size()) * tb.matrix(axes_b.size());
    return out;
}

Tensor apply_local_operator(const Tensor& t, std::size_t first_axis, std::size_t count,
                            const Eigen::MatrixXcd& op, const Shape& out_dims) {
    if (count == 0 || first_axis + count > t.rank())
        throw ShapeMismatch("operator axes out of range");
    Shape in_dims(t.shape().begin() + static_cast<long>(first_axis),
                  t.shape().begin() + static_cast<long>(first_axis + count));
    const Shape outd = out_dims.empty() ? in_dims : out_dims;
    if (outd.size() != count) throw ShapeMismatch("output dims do not match operator axes");
    if (static_cast<std::size_t>(op.cols()) != product(in_dims) ||
        static_cast<std::size_t>(op.rows()) != product(outd))
        throw ShapeMismatch(fmt::format("{}x{} operator on axes {}", op.rows(), op.cols(), shape_str(in_dims)));

    // Reverse the operator axes so that the column-major joint index equals
    // the Kronecker index (first operator axis most significant).
    std::vector<std::size_t> perm;
    for (std::size_t i = 0; i < first_axis; ++i) perm.push_back(i);
    for (std::size_t i = 0; i < count; ++i) perm.push_back(first_axis + count - 1 - i);
    for (std::size_t i = first_axis + count; i < t.rank(); ++i) perm.push_back(i);
    const Tensor tp = t.permuted(perm);

    const std::size_t pre = product(t.shape(), 0, first_axis);
    const std::size_t post = product(t.shape(), first_axis + count);
    const std::size_t din = product(in_dims), dout = product(outd);
    Shape mid_shape;
    for (std::size_t i = 0; i < first_axis; ++i) mid_shape.push_back(t.dim(i));
    for (std::size_t i = 0; i < count; ++i) mid_shape.push_back(outd[count - 1 - i]);
    for (std::size_t i = first_axis + count; i < t.rank(); ++i) mid_shape.push_back(t.dim(i));
    Tensor mid(mid_shape);
    const auto P = static_cast<Eigen::Index>(pre);
    for (std::size_t q = 0; q < post; ++q) {
        Eigen::Map<const Eigen::MatrixXcd> src(tp.data() + q * pre * din, P, static_cast<Eigen::Index>(din));
        Eigen::Map<Eigen::MatrixXcd> dst(mid.data() + q * pre * dout, P, static_cast<Eigen::Index>(dout));
        dst.noalias() = src * op.transpose();
    }
    return mid.permuted(perm); // the permutation is an involution
}

// ---------------------------------------------------------------- sites

SiteTensor::SiteTensor(Tensor t, SiteLabel l) : data(std::move(t)), label(l) { validate(); }

void SiteTensor::validate() const {
    if (data.rank() != 3)
        throw ShapeMismatch(fmt::format("site tensor must have rank 3, got {}", data.rank()));
}

Eigen::MatrixXcd SiteTensor::slice(std::size_t s) const {
    if (s >= phys()) throw ShapeMismatch("physical index out of range");
    Eigen::MatrixXcd m(left(), right());
    for (std::size_t r = 0; r < right(); ++r)
        for (std::size_t l = 0; l < left(); ++l)
            m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = data({l, s, r});
    return m;
}

double left_isometry_error(const SiteTensor& site) {
    const auto m = site.data.matrix(2);
    const Eigen::MatrixXcd g = m.adjoint() * m;
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double right_isometry_error(const SiteTensor& site) {
    const auto m = site.data.matrix(1);
    const Eigen::MatrixXcd g = m * m.adjoint();
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

SplitResult split_svd(const Tensor& theta, std::size_t row_axes, const TruncationPolicy& policy) {
    if (row_axes == 0 || row_axes >= theta.rank())
        throw ShapeMismatch("split needs at least one axis on each side");
    const auto raw = svd_truncate(theta.matrix(row_axes), policy, Absorb::Right);
    const std::size_t k = raw.s.size();
    Shape ls(theta.shape().begin(), theta.shape().begin() + static_cast<long>(row_axes));
    ls.push_back(k);
    Shape rs{k};
    rs.insert(rs.end(), theta.shape().begin() + static_cast<long>(row_axes), theta.shape().end());
    return {from_matrix(raw.u, ls), from_matrix(raw.vh, rs), raw.s, raw.error, raw.chi_limited};
}

// ---------------------------------------------------------------- Mps

Mps::Mps(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        sites_[i].validate();
        if (i + 1 < sites_.size() && sites_[i].right() != sites_[i + 1].left())
            throw ShapeMismatch(fmt::format("bond {} mismatch: {} vs {}", i, sites_[i].right(),
                                            sites_[i + 1].left()));
    }
    if (!sites_.empty() && (sites_.front().left() != 1 || sites_.back().right() != 1))
        throw ShapeMismatch("open chain needs unit outer bonds");
}

namespace {

// Makes site i left-canonical and pushes the remainder into site i + 1.
double shift_right(std::vector<SiteTensor>& s, std::size_t i, const TruncationPolicy& policy) {
    const Tensor& a = s[i].data;
    const auto raw = svd_truncate(a.matrix(2), policy, Absorb::Right);
    const std::size_t k = raw.s.size();
    s[i].data = from_matrix(raw.u, {a.dim(0), a.dim(1), k});
    Tensor& b = s[i + 1].data;
    Eigen::MatrixXcd nb = raw.vh * b.matrix(1);
    b = from_matrix(nb, {k, b.dim(1), b.dim(2)});
    return raw.error;
}

// Makes site i right-canonical and pushes the remainder into site i - 1.
double shift_left(std::vector<SiteTensor>& s, std::size_t i, const TruncationPolicy& policy) {
    const Tensor& a = s[i].data;
    const auto raw = svd_truncate(a.matrix(1), policy, Absorb::Left);
    const std::size_t k = raw.s.size();
    s[i].data = from_matrix(raw.vh, {k, a.dim(1), a.dim(2)});
    Tensor& b = s[i - 1].data;
    Eigen::MatrixXcd nb = b.matrix(2) * raw.u;
    b = from_matrix(nb, {b.dim(0), b.dim(1), k});
    return raw.error;
}

} // namespace

double Mps::canonicalize(std::size_t c, const TruncationPolicy& policy) {
    require_site(*this, c, "canonicalize");
    double err = 0.0;
    for (std::size_t i = 0; i < c; ++i) err += shift_right(sites_, i, policy);
    for (std::size_t i = sites_.size() - 1; i > c; --i) err += shift_left(sites_, i, policy);
    center_ = c;
    canonical_ = true;
    return err;
}

double Mps::move_center(std::size_t c, const TruncationPolicy& policy) {
    require_site(*this, c, "move_center");
    if (!canonical_) return canonicalize(c, policy);
    double err = 0.0;
    while (center_ < c) err += shift_right(sites_, center_++, policy);
    while (center_ > c) err += shift_left(sites_, center_--, policy);
    return err;
}

double Mps::norm2() const {
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    for (const auto& site : sites_) {
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(site.right(), site.right());
        for (std::size_t s = 0; s < site.phys(); ++s) {
            const Eigen::MatrixXcd a = site.slice(s);
            next.noalias() += a.adjoint() * env * a;
        }
        env = std::move(next);
    }
    return env.size() ? env(0, 0).real() : 0.0;
}

std::size_t Mps::max_bond() const {
    std::size_t m = 1;
    for (const auto& s : sites_) m = std::max(m, s.right());
    return m;
}

Eigen::VectorXcd to_dense(const Mps& state, std::size_t max_dim) {
    std::size_t total = 1;
    for (const auto& s : state.sites()) {
        total *= s.phys();
        if (total > max_dim)
            throw ShapeMismatch(fmt::format("dense state would exceed {} amplitudes", max_dim));
    }
    Eigen::MatrixXcd cur = Eigen::MatrixXcd::Ones(1, 1);
    for (const auto& site : state.sites()) {
        const auto d = static_cast<Eigen::Index>(site.phys());
        Eigen::MatrixXcd next(cur.rows() * d, static_cast<Eigen::Index>(site.right()));
        for (Eigen::Index s = 0; s < d; ++s) {
            const Eigen::MatrixXcd part = cur * site.slice(static_cast<std::size_t>(s));
            for (Eigen::Index j = 0; j < cur.rows(); ++j) next.row(j * d + s) = part.row(j);
        }
        cur = std::move(next);
    }
    return cur.col(0);
}

GateReport apply_two_site_gate(Mps& state, std::size_t site, const Eigen::MatrixXcd& gate,
                               const TruncationPolicy& policy) {
    require_site(state, site, "apply_two_site_gate");
    require_site(state, site + 1, "apply_two_site_gate");
    const std::size_t d1 = state.site(site).phys(), d2 = state.site(site + 1).phys();
    if (static_cast<std::size_t>(gate.rows()) != d1 * d2 || gate.rows() != gate.cols())
        throw ShapeMismatch(fmt::format("{}x{} gate on sites of dimension {} and {}", gate.rows(),
                                        gate.cols(), d1, d2));
    const double dev =
        (gate.adjoint() * gate - Eigen::MatrixXcd::Identity(gate.rows(), gate.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-10) throw NonUnitaryGate(fmt::format("|U^dag U - 1| = {:.3e}", dev));

    GateReport report;
    report.truncation_error += state.move_center(site, policy);
    const Tensor theta = contract(state.site(site).data, {2}, state.site(site + 1).data, {0});
    const Tensor updated = apply_local_operator(theta, 1, 2, gate);
    auto split = split_svd(updated, 2, policy);
    state.site(site).data = std::move(split.left);
    state.site(site + 1).data = std::move(split.right);
    state.set_center(site + 1);
    report.truncation_error += split.error;
    report.chi_limited = split.chi_limited;
    return report;
}

cd expectation_mpo(const Mps& state, std::span<const LocalOp> ops) {
    for (std::size_t i = 0; i < ops.size(); ++i) {
        require_site(state, ops[i].site, "expectation_mpo");
        if (i > 0 && ops[i].site <= ops[i - 1].site)
            throw SiteOutOfRange("operator sites must be strictly increasing");
        const auto d = static_cast<Eigen::Index>(state.site(ops[i].site).phys());
        if (ops[i].op.rows() != d || ops[i].op.cols() != d)
            throw ShapeMismatch(fmt::format("operator on site {} has wrong dimension", ops[i].site));
    }
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    std::size_t next_op = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const auto& site = state.site(i);
        const bool has_op = next_op < ops.size() && ops[next_op].site == i;
        std::vector<Eigen::MatrixXcd> slices(site.phys());
        for (std::size_t s = 0; s < site.phys(); ++s) slices[s] = site.slice(s);
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(site.right(), site.right());
        for (std::size_t sp = 0; sp < site.phys(); ++sp) {
            Eigen::MatrixXcd ket;
            if (has_op) {
                ket = Eigen::MatrixXcd::Zero(site.left(), site.right());
                for (std::size_t s = 0; s < site.phys(); ++s) {
                    const cd o = ops[next_op].op(static_cast<Eigen::Index>(sp), static_cast<Eigen::Index>(s));
                    if (o != cd{0.0}) ket += o * slices[s];
                }
            } else {
                ket = slices[sp];
            }
            next.noalias() += slices[sp].adjoint() * env * ket;
        }
        env = std::move(next);
        if (has_op) ++next_op;
    }
    return env(0, 0);
}

Eigen::MatrixXcd annihilation(std::size_t d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t n = 1; n < d; ++n)
        a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXcd number_op(std::size_t d) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) n(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = static_cast<double>(k);
    return n;
}

} // namespace wqed::tn
