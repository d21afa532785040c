#include "mglra/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mglra {

namespace {

thread_local Tape* g_active_tape = nullptr;
thread_local std::uint64_t g_numeric_warnings = 0;

std::string shape_to_str(std::size_t r, std::size_t c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

std::shared_ptr<detail::TensorImpl> new_impl(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ShapeError("tensor dimensions must be positive");
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = {rows, cols};
    impl->data.assign(rows * cols, 0.0);
    return impl;
}

void check_finite_impl(const detail::TensorImpl& impl, const std::string& context) {
    for (double v : impl.data) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite value produced by " + context);
        }
    }
}

} // namespace

std::uint64_t numeric_warning_count() { return g_numeric_warnings; }
void reset_numeric_warnings() { g_numeric_warnings = 0; }
void bump_numeric_warning() { ++g_numeric_warnings; }

namespace detail {

void ensure_grad(TensorImpl& t) {
    if (t.grad.empty()) t.grad.assign(t.data.size(), 0.0);
}

bool record_op(const std::vector<std::shared_ptr<TensorImpl>>& inputs,
               const std::shared_ptr<TensorImpl>& output,
               std::function<void()> backward_fn) {
    Tape* tape = g_active_tape;
    if (tape == nullptr) return false;
    bool tracked = false;
    for (const auto& in : inputs) {
        if (in && in->on_tape) { tracked = true; break; }
    }
    if (!tracked) return false;
    output->on_tape = true;
    output->tape_id = static_cast<std::int64_t>(tape->size());
    tape->push(std::move(backward_fn));
    return true;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tensor basics
// ---------------------------------------------------------------------------

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
    auto impl = new_impl(rows, cols);
    impl->requires_grad = requires_grad;
    impl->on_tape = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::constant(std::size_t rows, std::size_t cols, double value) {
    if (!std::isfinite(value)) throw NumericError("non-finite value in tensor constructor");
    auto impl = new_impl(rows, cols);
    std::fill(impl->data.begin(), impl->data.end(), value);
    return Tensor(std::move(impl));
}

Tensor Tensor::from_data(std::size_t rows, std::size_t cols, std::vector<double> data,
                         bool requires_grad) {
    if (rows * cols != data.size()) {
        throw ShapeError("from_data: shape " + shape_to_str(rows, cols) + " needs " +
                         std::to_string(rows * cols) + " values, got " +
                         std::to_string(data.size()));
    }
    auto impl = new_impl(rows, cols);
    impl->data = std::move(data);
    impl->requires_grad = requires_grad;
    impl->on_tape = requires_grad;
    check_finite_impl(*impl, "tensor constructor");
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double v) { return from_data(1, 1, {v}); }

Tensor Tensor::identity(std::size_t n) {
    auto impl = new_impl(n, n);
    for (std::size_t i = 0; i < n; ++i) impl->data[i * n + i] = 1.0;
    return Tensor(std::move(impl));
}

std::string Tensor::shape_str() const { return shape_to_str(rows(), cols()); }

double Tensor::item() const {
    if (size() != 1) throw ContractError("item() on non-scalar tensor " + shape_str());
    return impl_->data[0];
}

const std::vector<double>& Tensor::grad() const {
    if (impl_->grad.empty()) throw ContractError("grad accessed before backward populated it");
    return impl_->grad;
}

void Tensor::zero_grad() {
    std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

void Tensor::check_finite(const std::string& context) const {
    check_finite_impl(*impl_, context);
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

void backward(const Tensor& loss) {
    if (loss.size() != 1) {
        throw ContractError("backward: loss must be scalar, got " + loss.shape_str());
    }
    Tape* tape = g_active_tape;
    if (tape == nullptr) throw ContractError("backward: no active tape");
    auto impl = loss.impl();
    if (!impl->on_tape) {
        throw ContractError("backward: loss is not connected to the active tape");
    }
    detail::ensure_grad(*impl);
    impl->grad[0] += 1.0;
    const auto& records = tape->records();
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        it->apply();
    }
    tape->clear();
}

// ---------------------------------------------------------------------------
// Op helpers
// ---------------------------------------------------------------------------

namespace {

using detail::TensorImpl;

using ImplPtr = std::shared_ptr<TensorImpl>;

Tensor finish_unary(const Tensor& in, ImplPtr out, const char* name,
                    std::function<void(TensorImpl&, TensorImpl&)> back) {
    check_finite_impl(*out, name);
    auto in_impl = in.impl();
    detail::record_op({in_impl}, out, [in_impl, out, back]() {
        if (out->grad.empty()) return;
        detail::ensure_grad(*in_impl);
        back(*in_impl, *out);
    });
    return make_from_impl(std::move(out));
}

// Broadcast classification for add/mul: returns how b maps onto a's shape.
enum class Bcast { Same, Scalar, Row, Col, None };

Bcast classify(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc) {
    if (ar == br && ac == bc) return Bcast::Same;
    if (br == 1 && bc == 1) return Bcast::Scalar;
    if (br == 1 && bc == ac) return Bcast::Row;
    if (bc == 1 && br == ar) return Bcast::Col;
    return Bcast::None;
}

// index of the b element aligned with a's (r, c)
inline std::size_t bcast_index(Bcast k, std::size_t r, std::size_t c, std::size_t cols) {
    switch (k) {
        case Bcast::Same: return r * cols + c;
        case Bcast::Scalar: return 0;
        case Bcast::Row: return c;
        case Bcast::Col: return r;
        default: return 0;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// matmul / transpose
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree: " + a.shape_str() + " x " +
                         b.shape_str());
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    auto out = new_impl(m, n);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = out->data.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = pa[i * k + kk];
            if (av == 0.0) continue;
            const double* brow = pb + kk * n;
            double* crow = pc + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    check_finite_impl(*out, "matmul");
    auto ia = a.impl(), ib = b.impl();
    detail::record_op({ia, ib}, out, [ia, ib, out, m, k, n]() {
        if (out->grad.empty()) return;
        const double* g = out->grad.data();
        if (ia->on_tape) {
            detail::ensure_grad(*ia);
            // dA = G * B^T
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t kk = 0; kk < k; ++kk) {
                    double acc = 0.0;
                    const double* grow = g + i * n;
                    const double* brow = ib->data.data() + kk * n;
                    for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                    ia->grad[i * k + kk] += acc;
                }
        }
        if (ib->on_tape) {
            detail::ensure_grad(*ib);
            // dB = A^T * G
            for (std::size_t kk = 0; kk < k; ++kk)
                for (std::size_t i = 0; i < m; ++i) {
                    const double av = ia->data[i * k + kk];
                    if (av == 0.0) continue;
                    const double* grow = g + i * n;
                    double* brow = ib->grad.data() + kk * n;
                    for (std::size_t j = 0; j < n; ++j) brow[j] += av * grow[j];
                }
        }
    });
    return make_from_impl(std::move(out));
}

Tensor transpose(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    auto out = new_impl(n, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out->data[j * m + i] = a.at(i, j);
    auto ia = a.impl();
    detail::record_op({ia}, out, [ia, out, m, n]() {
        if (out->grad.empty()) return;
        detail::ensure_grad(*ia);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) ia->grad[i * n + j] += out->grad[j * m + i];
    });
    return make_from_impl(std::move(out));
}

// ---------------------------------------------------------------------------
// add / mul with broadcasting
// ---------------------------------------------------------------------------

namespace {

Tensor binary_broadcast(const Tensor& a, const Tensor& b, bool is_add, const char* name) {
    // Orient so the broadcast side is b.
    Bcast kind = classify(a.rows(), a.cols(), b.rows(), b.cols());
    if (kind == Bcast::None) {
        Bcast swapped = classify(b.rows(), b.cols(), a.rows(), a.cols());
        if (swapped != Bcast::None) return binary_broadcast(b, a, is_add, name);
        throw ShapeError(std::string(name) + ": incompatible shapes " + a.shape_str() + " and " +
                         b.shape_str());
    }
    const std::size_t m = a.rows(), n = a.cols();
    auto out = new_impl(m, n);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double bv = pb[bcast_index(kind, r, c, n)];
            out->data[r * n + c] = is_add ? pa[r * n + c] + bv : pa[r * n + c] * bv;
        }
    check_finite_impl(*out, name);
    auto ia = a.impl(), ib = b.impl();
    detail::record_op({ia, ib}, out, [ia, ib, out, kind, m, n, is_add]() {
        if (out->grad.empty()) return;
        const double* g = out->grad.data();
        if (ia->on_tape) {
            detail::ensure_grad(*ia);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    const double gv = g[r * n + c];
                    ia->grad[r * n + c] +=
                        is_add ? gv : gv * ib->data[bcast_index(kind, r, c, n)];
                }
        }
        if (ib->on_tape) {
            detail::ensure_grad(*ib);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    const double gv = g[r * n + c];
                    ib->grad[bcast_index(kind, r, c, n)] +=
                        is_add ? gv : gv * ia->data[r * n + c];
                }
        }
    });
    return make_from_impl(std::move(out));
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary_broadcast(a, b, true, "add"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_broadcast(a, b, false, "mul"); }

Tensor affine(const Tensor& t, double scale, double shift) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) out->data[i] = scale * t.values()[i] + shift;
    return finish_unary(t, std::move(out), "affine", [scale](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i) in.grad[i] += scale * o.grad[i];
    });
}

// ---------------------------------------------------------------------------
// activations
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& t) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) out->data[i] = t.values()[i] > 0.0 ? t.values()[i] : 0.0;
    return finish_unary(t, std::move(out), "relu", [](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i)
            if (in.data[i] > 0.0) in.grad[i] += o.grad[i];
    });
}

Tensor sigmoid(const Tensor& t) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = t.values()[i];
        out->data[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                : std::exp(x) / (1.0 + std::exp(x));
    }
    return finish_unary(t, std::move(out), "sigmoid", [](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i) {
            const double s = o.data[i];
            in.grad[i] += o.grad[i] * s * (1.0 - s);
        }
    });
}

Tensor tanh_op(const Tensor& t) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) out->data[i] = std::tanh(t.values()[i]);
    return finish_unary(t, std::move(out), "tanh", [](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i) {
            const double y = o.data[i];
            in.grad[i] += o.grad[i] * (1.0 - y * y);
        }
    });
}

Tensor softmax_rows(const Tensor& t) {
    const std::size_t m = t.rows(), n = t.cols();
    auto out = new_impl(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        const double* row = t.values().data() + r * n;
        double mx = row[0];
        for (std::size_t c = 1; c < n; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        double* orow = out->data.data() + r * n;
        for (std::size_t c = 0; c < n; ++c) {
            orow[c] = std::exp(row[c] - mx);
            sum += orow[c];
        }
        for (std::size_t c = 0; c < n; ++c) orow[c] /= sum;
    }
    return finish_unary(t, std::move(out), "softmax_rows", [m, n](TensorImpl& in, TensorImpl& o) {
        // dx = y * (g - sum(g*y))
        for (std::size_t r = 0; r < m; ++r) {
            const double* y = o.data.data() + r * n;
            const double* g = o.grad.data() + r * n;
            double dot = 0.0;
            for (std::size_t c = 0; c < n; ++c) dot += g[c] * y[c];
            double* gi = in.grad.data() + r * n;
            for (std::size_t c = 0; c < n; ++c) gi[c] += y[c] * (g[c] - dot);
        }
    });
}

// ---------------------------------------------------------------------------
// concatenation / slicing / gathering
// ---------------------------------------------------------------------------

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ContractError("concat_cols: empty input list");
    const std::size_t m = parts[0].rows();
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.rows() != m)
            throw ShapeError("concat_cols: row mismatch " + p.shape_str() + " vs " +
                             parts[0].shape_str());
        total += p.cols();
    }
    auto out = new_impl(m, total);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t r = 0; r < m; ++r)
            std::copy(p.values().begin() + r * p.cols(), p.values().begin() + (r + 1) * p.cols(),
                      out->data.begin() + r * total + off);
        off += p.cols();
    }
    std::vector<ImplPtr> impls;
    impls.reserve(parts.size());
    for (const auto& p : parts) impls.push_back(p.impl());
    detail::record_op(impls, out, [impls, out, m, total]() {
        if (out->grad.empty()) return;
        std::size_t off = 0;
        for (const auto& in : impls) {
            const std::size_t w = in->shape[1];
            if (in->on_tape) {
                detail::ensure_grad(*in);
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t c = 0; c < w; ++c)
                        in->grad[r * w + c] += out->grad[r * total + off + c];
            }
            off += w;
        }
    });
    return make_from_impl(std::move(out));
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ContractError("concat_rows: empty input list");
    const std::size_t n = parts[0].cols();
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.cols() != n)
            throw ShapeError("concat_rows: column mismatch " + p.shape_str() + " vs " +
                             parts[0].shape_str());
        total += p.rows();
    }
    auto out = new_impl(total, n);
    std::size_t off = 0;
    for (const auto& p : parts) {
        std::copy(p.values().begin(), p.values().end(), out->data.begin() + off * n);
        off += p.rows();
    }
    std::vector<ImplPtr> impls;
    impls.reserve(parts.size());
    for (const auto& p : parts) impls.push_back(p.impl());
    detail::record_op(impls, out, [impls, out, n]() {
        if (out->grad.empty()) return;
        std::size_t off = 0;
        for (const auto& in : impls) {
            const std::size_t r = in->shape[0];
            if (in->on_tape) {
                detail::ensure_grad(*in);
                for (std::size_t i = 0; i < r * n; ++i) in->grad[i] += out->grad[off * n + i];
            }
            off += r;
        }
    });
    return make_from_impl(std::move(out));
}

Tensor slice_rows(const Tensor& t, std::size_t start, std::size_t count) {
    if (start + count > t.rows() || count == 0) {
        throw ContractError("slice_rows: range [" + std::to_string(start) + ", " +
                            std::to_string(start + count) + ") out of " +
                            std::to_string(t.rows()) + " rows");
    }
    const std::size_t n = t.cols();
    auto out = new_impl(count, n);
    std::copy(t.values().begin() + start * n, t.values().begin() + (start + count) * n,
              out->data.begin());
    return finish_unary(t, std::move(out), "slice_rows",
                        [start, n](TensorImpl& in, TensorImpl& o) {
                            for (std::size_t i = 0; i < o.grad.size(); ++i)
                                in.grad[start * n + i] += o.grad[i];
                        });
}

Tensor select_rows(const Tensor& t, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw ContractError("select_rows: empty index list");
    const std::size_t n = t.cols();
    for (std::size_t idx : indices)
        if (idx >= t.rows())
            throw ContractError("select_rows: index " + std::to_string(idx) + " out of " +
                                std::to_string(t.rows()) + " rows");
    auto out = new_impl(indices.size(), n);
    for (std::size_t r = 0; r < indices.size(); ++r)
        std::copy(t.values().begin() + indices[r] * n, t.values().begin() + (indices[r] + 1) * n,
                  out->data.begin() + r * n);
    auto idx = indices;
    return finish_unary(t, std::move(out), "select_rows", [idx, n](TensorImpl& in, TensorImpl& o) {
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < n; ++c) in.grad[idx[r] * n + c] += o.grad[r * n + c];
    });
}

Tensor reshape(const Tensor& t, std::size_t rows, std::size_t cols) {
    if (rows * cols != t.size())
        throw ShapeError("reshape: cannot view " + t.shape_str() + " as " +
                         shape_to_str(rows, cols));
    auto out = new_impl(rows, cols);
    out->data = t.values();
    return finish_unary(t, std::move(out), "reshape", [](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i) in.grad[i] += o.grad[i];
    });
}

Tensor gather_per_row(const Tensor& t, const std::vector<std::size_t>& col_index) {
    if (col_index.size() != t.rows())
        throw ContractError("gather_per_row: need one column index per row");
    for (std::size_t c : col_index)
        if (c >= t.cols())
            throw ContractError("gather_per_row: column " + std::to_string(c) + " out of " +
                                std::to_string(t.cols()));
    auto out = new_impl(t.rows(), 1);
    for (std::size_t r = 0; r < t.rows(); ++r) out->data[r] = t.at(r, col_index[r]);
    auto idx = col_index;
    const std::size_t n = t.cols();
    return finish_unary(t, std::move(out), "gather_per_row",
                        [idx, n](TensorImpl& in, TensorImpl& o) {
                            for (std::size_t r = 0; r < idx.size(); ++r)
                                in.grad[r * n + idx[r]] += o.grad[r];
                        });
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

Tensor row_sums(const Tensor& t) {
    const std::size_t m = t.rows(), n = t.cols();
    auto out = new_impl(m, 1);
    for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += t.at(r, c);
        out->data[r] = s;
    }
    return finish_unary(t, std::move(out), "row_sums", [m, n](TensorImpl& in, TensorImpl& o) {
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < n; ++c) in.grad[r * n + c] += o.grad[r];
    });
}

Tensor sum_all(const Tensor& t) {
    auto out = new_impl(1, 1);
    double s = 0.0;
    for (double v : t.values()) s += v;
    out->data[0] = s;
    return finish_unary(t, std::move(out), "sum_all", [](TensorImpl& in, TensorImpl& o) {
        for (double& g : in.grad) g += o.grad[0];
    });
}

// ---------------------------------------------------------------------------
// guarded elementwise ops
// ---------------------------------------------------------------------------

Tensor safe_rsqrt(const Tensor& t) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = t.values()[i];
        if (x > 0.0) {
            out->data[i] = 1.0 / std::sqrt(x);
        } else {
            out->data[i] = 0.0;
            ++g_numeric_warnings;
        }
    }
    return finish_unary(t, std::move(out), "safe_rsqrt", [](TensorImpl& in, TensorImpl& o) {
        for (std::size_t i = 0; i < in.grad.size(); ++i) {
            const double y = o.data[i];
            if (y > 0.0) in.grad[i] += o.grad[i] * (-0.5 * y * y * y);
        }
    });
}

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kAcosGuard = 1e-12; // derivative clamp distance from |x| = 1
} // namespace

Tensor angular_similarity(const Tensor& t) {
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = std::clamp(t.values()[i], -1.0, 1.0);
        out->data[i] = 1.0 - std::acos(x) / kPi;
    }
    return finish_unary(t, std::move(out), "angular_similarity",
                        [](TensorImpl& in, TensorImpl& o) {
                            for (std::size_t i = 0; i < in.grad.size(); ++i) {
                                const double x = in.data[i];
                                if (x > 1.0 || x < -1.0) continue; // clamped region: flat
                                const double xa = std::clamp(x, -1.0 + kAcosGuard, 1.0 - kAcosGuard);
                                in.grad[i] += o.grad[i] / (kPi * std::sqrt(1.0 - xa * xa));
                            }
                        });
}

Tensor neg_log_clamped(const Tensor& t, double floor) {
    if (floor <= 0.0) throw ContractError("neg_log_clamped: floor must be positive");
    auto out = new_impl(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double x = t.values()[i];
        if (x < floor) {
            x = floor;
            ++g_numeric_warnings;
        }
        out->data[i] = -std::log(x);
    }
    return finish_unary(t, std::move(out), "neg_log_clamped",
                        [floor](TensorImpl& in, TensorImpl& o) {
                            for (std::size_t i = 0; i < in.grad.size(); ++i) {
                                const double x = in.data[i];
                                if (x >= floor) in.grad[i] += o.grad[i] * (-1.0 / x);
                            }
                        });
}

// ---------------------------------------------------------------------------
// initialization
// ---------------------------------------------------------------------------

double xavier_scale(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor seeded_uniform_init(RngStream& rng, std::size_t rows, std::size_t cols, double scale,
                           bool requires_grad) {
    if (scale <= 0.0) throw ContractError("seeded_uniform_init: scale must be positive");
    std::vector<double> data(rows * cols);
    for (double& v : data) v = rng.uniform_range(-scale, scale);
    return Tensor::from_data(rows, cols, std::move(data), requires_grad);
}

} // namespace mglra
