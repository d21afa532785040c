#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mglra/errors.hpp"
#include "mglra/rng.hpp"

namespace mglra {

class Tape;

namespace detail {

struct TensorImpl {
    std::vector<std::size_t> shape; // rank 2 throughout: {rows, cols}
    std::vector<double> data;
    std::vector<double> grad;       // empty until backward touches it
    bool requires_grad = false;
    bool on_tape = false;           // leaf with requires_grad, or produced by a recorded op
    std::int64_t tape_id = -1;      // producing record index, -1 for leaves
};

void ensure_grad(TensorImpl& t);

} // namespace detail

// Dense 2-D tensor of 64-bit reals with an optional gradient slot. Values are
// immutable once created except for the grad slot and explicit parameter
// updates through mutable_values() (optimizer / finite-difference use).
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
    static Tensor constant(std::size_t rows, std::size_t cols, double value);
    static Tensor from_data(std::size_t rows, std::size_t cols, std::vector<double> data,
                            bool requires_grad = false);
    static Tensor scalar(double v);
    static Tensor identity(std::size_t n);

    bool defined() const { return impl_ != nullptr; }
    std::size_t rows() const { return impl_->shape[0]; }
    std::size_t cols() const { return impl_->shape[1]; }
    std::size_t size() const { return impl_->data.size(); }
    const std::vector<std::size_t>& shape() const { return impl_->shape; }
    std::string shape_str() const;

    double at(std::size_t r, std::size_t c) const { return impl_->data[r * cols() + c]; }
    double item() const;

    const std::vector<double>& values() const { return impl_->data; }
    // In-place write access for optimizers and gradient checking only; the
    // caller owns re-validation of finiteness via check_finite().
    std::vector<double>& mutable_values() { return impl_->data; }

    bool requires_grad() const { return impl_->requires_grad; }
    bool has_grad() const { return !impl_->grad.empty(); }
    const std::vector<double>& grad() const;
    void zero_grad();

    void check_finite(const std::string& context) const;

    std::shared_ptr<detail::TensorImpl> impl() const { return impl_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<detail::TensorImpl> impl_;

    friend class Tape;
    friend Tensor make_from_impl(std::shared_ptr<detail::TensorImpl>);
};

inline Tensor make_from_impl(std::shared_ptr<detail::TensorImpl> impl) {
    return Tensor(std::move(impl));
}

// Reverse-mode Wengert list. Records are appended in execution order and
// replayed in reverse by backward(); cleared after every backward pass.
// Confined to one thread via TapeScope; ops record only while a scope is
// active and at least one input is tracked.
class Tape {
public:
    struct Record {
        std::function<void()> apply;
    };

    std::size_t size() const { return records_.size(); }
    void clear() { records_.clear(); }
    void push(std::function<void()> fn) { records_.push_back(Record{std::move(fn)}); }
    const std::vector<Record>& records() const { return records_; }

private:
    std::vector<Record> records_;
};

// RAII activation of a tape on the current thread.
class TapeScope {
public:
    explicit TapeScope(Tape& tape);
    ~TapeScope();
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape* previous_;
};

Tape* active_tape();

namespace detail {

// Custom-op support: marks the output as tape-tracked and records the
// backward closure if tracking applies. Returns true when recorded.
bool record_op(const std::vector<std::shared_ptr<TensorImpl>>& inputs,
               const std::shared_ptr<TensorImpl>& output,
               std::function<void()> backward_fn);

} // namespace detail

// ---------------------------------------------------------------------------
// Differentiable ops. Every op validates shapes, registers its gradient rule
// on the active tape, and rejects non-finite outputs.
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Broadcasting for add/mul: identical shapes, or one side is 1x1, 1xN (row)
// or Mx1 (column) against MxN.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// scale * t + shift, elementwise.
Tensor affine(const Tensor& t, double scale, double shift);

Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor tanh_op(const Tensor& t);

// Row-wise softmax with per-row max subtraction.
Tensor softmax_rows(const Tensor& t);

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& t, std::size_t start, std::size_t count);
Tensor select_rows(const Tensor& t, const std::vector<std::size_t>& indices);

// Row-major reshape; element count must be preserved.
Tensor reshape(const Tensor& t, std::size_t rows, std::size_t cols);

// out[r, 0] = t[r, col_index[r]]
Tensor gather_per_row(const Tensor& t, const std::vector<std::size_t>& col_index);

Tensor row_sums(const Tensor& t); // Mx1
Tensor sum_all(const Tensor& t);  // 1x1

// 1/sqrt(x) elementwise; x <= 0 maps to 0 (zero-norm guard) and bumps the
// warning counter instead of erroring.
Tensor safe_rsqrt(const Tensor& t);

// 1 - arccos(clamp(x, -1, 1)) / pi, elementwise. The derivative is clamped
// near |x| = 1 where arccos' diverges; the forward value is exact.
Tensor angular_similarity(const Tensor& t);

// -log(max(x, floor)) elementwise; clamping bumps the warning counter.
Tensor neg_log_clamped(const Tensor& t, double floor = 1e-12);

// Populates grads of every tracked tensor reachable from the scalar loss,
// then clears the active tape.
void backward(const Tensor& loss);

// Monotone counters for soft numeric fallbacks (zero-norm similarity,
// clamped log probabilities). Thread-local.
std::uint64_t numeric_warning_count();
void reset_numeric_warnings();
void bump_numeric_warning();

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

double xavier_scale(std::size_t fan_in, std::size_t fan_out);

// Values uniform in [-scale, scale], drawn deterministically from rng.
Tensor seeded_uniform_init(RngStream& rng, std::size_t rows, std::size_t cols, double scale,
                           bool requires_grad = true);

} // namespace mglra
