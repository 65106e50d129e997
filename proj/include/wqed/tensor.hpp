// tensor.hpp: Minimal dense complex tensor-network core
//
// Tensors are stored column-major (first index fastest). A site tensor has
// axes (bond_left, physical, bond_right); joint physical indices of several
// sites follow Kronecker order (first site most significant), matching
// Eigen::kroneckerProduct(A, B) for operators A on the first site.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wqed/system.hpp"

namespace wqed::tn {

using cd = std::complex<double>;
using Shape = std::vector<std::size_t>;

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<cd> data);

    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    cd* data() { return data_.data(); }
    const cd* data() const { return data_.data(); }
    const std::vector<cd>& values() const { return data_; }

    cd& operator()(std::initializer_list<std::size_t> index);
    cd operator()(std::initializer_list<std::size_t> index) const;

    // result.axis(i) = this.axis(perm[i])
    Tensor permuted(std::span<const std::size_t> perm) const;
    Tensor permuted(std::initializer_list<std::size_t> perm) const;
    // Same data, new shape with equal total size (column-major reinterpretation).
    Tensor reshaped(Shape shape) const;

    // View as a matrix whose rows combine the first `row_axes` axes.
    Eigen::Map<Eigen::MatrixXcd> matrix(std::size_t row_axes);
    Eigen::Map<const Eigen::MatrixXcd> matrix(std::size_t row_axes) const;

    double norm() const;
    Tensor conj() const;

private:
    std::size_t offset(std::initializer_list<std::size_t> index) const;

    Shape shape_;
    std::vector<cd> data_;
};

// Contract a's `axes_a` against b's `axes_b` pairwise. Result axes are a's
// free axes in order, then b's free axes in order. Throws ShapeMismatch.
Tensor contract(const Tensor& a, std::span<const std::size_t> axes_a, const Tensor& b,
                std::span<const std::size_t> axes_b);
Tensor contract(const Tensor& a, std::initializer_list<std::size_t> axes_a, const Tensor& b,
                std::initializer_list<std::size_t> axes_b);

// Apply `op` to `count` consecutive axes starting at `first_axis`
// (joint index in Kronecker order). The output dims of those axes are
// `out_dims` (defaults to the input dims when empty).
Tensor apply_local_operator(const Tensor& t, std::size_t first_axis, std::size_t count,
                            const Eigen::MatrixXcd& op, const Shape& out_dims = {});

struct SiteLabel {
    enum class Kind { Bin, Emitter };
    Kind kind{Kind::Bin};
    Channel channel{Channel::R};
    std::size_t time_index{0};

    static SiteLabel emitter() { return {Kind::Emitter, Channel::R, 0}; }
    static SiteLabel bin(Channel ch, std::size_t k) { return {Kind::Bin, ch, k}; }
    friend bool operator==(const SiteLabel&, const SiteLabel&) = default;
};

// Rank-3 tensor (bond_left, physical, bond_right) with a label.
struct SiteTensor {
    Tensor data;
    SiteLabel label;

    SiteTensor() = default;
    SiteTensor(Tensor t, SiteLabel l);

    std::size_t left() const { return data.dim(0); }
    std::size_t phys() const { return data.dim(1); }
    std::size_t right() const { return data.dim(2); }

    // A^s as a (left x right) matrix.
    Eigen::MatrixXcd slice(std::size_t s) const;
    void validate() const;
};

// Deviation from the left / right isometry conditions (max abs entry of A^dag A - 1).
double left_isometry_error(const SiteTensor& site);
double right_isometry_error(const SiteTensor& site);

struct TruncationPolicy {
    std::size_t chi_max{64};
    double svd_cutoff{1e-10}; // relative to the largest singular value
};

struct SplitResult {
    Tensor left;  // (row axes..., k), left-isometric
    Tensor right; // (k, column axes...), carries the singular values
    std::vector<double> singular_values; // kept, descending
    double error{0.0};                   // sqrt(sum of discarded s^2)
    bool chi_limited{false};             // chi_max discarded values above the cutoff
};

// SVD split after the first `row_axes` axes. Singular vectors are phase-fixed
// so that the first non-negligible entry of every left vector is real positive.
SplitResult split_svd(const Tensor& theta, std::size_t row_axes, const TruncationPolicy& policy);

// Matrix-product state over an open chain. Tracks the orthogonality centre
// once the state has been brought to mixed-canonical form.
class Mps {
public:
    Mps() = default;
    explicit Mps(std::vector<SiteTensor> sites);

    std::size_t size() const { return sites_.size(); }
    const SiteTensor& site(std::size_t i) const { return sites_.at(i); }
    SiteTensor& site(std::size_t i) { return sites_.at(i); }
    const std::vector<SiteTensor>& sites() const { return sites_; }

    bool is_canonical() const { return canonical_; }
    std::size_t center() const { return center_; }
    // Declares the form after an external update; callers guarantee it holds.
    void set_center(std::size_t c) { center_ = c; canonical_ = true; }

    // Full left and right sweeps producing mixed-canonical form with the
    // centre at `c`. Returns the accumulated truncation error.
    double canonicalize(std::size_t c, const TruncationPolicy& policy);
    // Shift the centre of an already canonical state. Exact (no truncation
    // beyond exact zeros) unless the policy is binding.
    double move_center(std::size_t c, const TruncationPolicy& policy);

    // <psi|psi> by full contraction.
    double norm2() const;
    // Largest bond dimension in the chain.
    std::size_t max_bond() const;

private:
    std::vector<SiteTensor> sites_;
    std::size_t center_{0};
    bool canonical_{false};
};

// Dense state vector (Kronecker order, site 0 most significant). Intended for
// small chains in checks; throws ShapeMismatch above `max_dim` amplitudes.
Eigen::VectorXcd to_dense(const Mps& state, std::size_t max_dim = 1u << 22);

struct GateReport {
    double truncation_error{0.0};
    bool chi_limited{false};
};

// Apply a unitary on sites (i, i+1); joint index s_i * d_{i+1} + s_{i+1}.
// Afterwards the orthogonality centre sits on site i + 1.
// Throws NonUnitaryGate if |U^dag U - 1| > 1e-10.
GateReport apply_two_site_gate(Mps& state, std::size_t site, const Eigen::MatrixXcd& gate,
                               const TruncationPolicy& policy);

struct LocalOp {
    std::size_t site{0};
    Eigen::MatrixXcd op;
};

// <psi| prod O_i |psi> with identity elsewhere; sites must be strictly
// increasing and in range (SiteOutOfRange).
cd expectation_mpo(const Mps& state, std::span<const LocalOp> ops);

// Bosonic operators on a truncated Fock space of dimension d.
Eigen::MatrixXcd annihilation(std::size_t d);
Eigen::MatrixXcd number_op(std::size_t d);

// Binary checkpoint: magic, version, metadata, then every site's label,
// shape and raw IEEE-754 data. Round trip is bit-exact.
struct Checkpoint {
    Mps state;
    std::map<std::string, std::string> meta;
};
void save_checkpoint(std::ostream& out, const Mps& state,
                     const std::map<std::string, std::string>& meta = {});
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Mps& state,
                     const std::map<std::string, std::string>& meta = {});
Checkpoint load_checkpoint(const std::string& path);

} // namespace wqed::tn
