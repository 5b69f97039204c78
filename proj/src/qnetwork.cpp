#include "cityplan/qnetwork.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "cityplan/errors.hpp"

namespace cityplan {

namespace {

constexpr char magic[8] = {'C', 'P', 'Q', 'N', 'E', 'T', '\0', '\0'};
constexpr std::uint32_t format_version = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}
    std::uint64_t get(int width) {
        if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw ParseError("weight file is truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::string_view take(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw ParseError("weight file is truncated");
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

struct QNetwork::Workspace {
    std::vector<double> a1, m1, h1, a2, m2, h2, a3, h3;
    QValues q{};
};

QNetwork::QNetwork(const QNetworkShape& shape) : shape_(shape) {
    if (shape.K < 2) throw ShapeError("the Q-network needs K >= 2 (two unpadded 3x3 convolutions)");
    if (shape.filters1 < 1 || shape.filters2 < 1 || shape.hidden < 1) throw ShapeError("layer sizes must be positive");
    const int k2 = QNetworkShape::kernel * QNetworkShape::kernel;
    const std::size_t sizes[TensorCount] = {
        static_cast<std::size_t>(shape.filters1 * StateTensor::layers * k2),
        static_cast<std::size_t>(shape.filters1),
        static_cast<std::size_t>(shape.filters2 * shape.filters1 * k2),
        static_cast<std::size_t>(shape.filters2),
        static_cast<std::size_t>(shape.hidden * shape.flat_features()),
        static_cast<std::size_t>(shape.hidden),
        static_cast<std::size_t>(action_count * shape.hidden),
        static_cast<std::size_t>(action_count),
    };
    offsets_[0] = 0;
    for (int t = 0; t < TensorCount; ++t) offsets_[t + 1] = offsets_[t] + sizes[t];
    params_.assign(offsets_[TensorCount], 0.0);
}

QNetwork::QNetwork(const QNetworkShape& shape, Rng& rng) : QNetwork(shape) {
    const int k2 = QNetworkShape::kernel * QNetworkShape::kernel;
    auto init = [&](Tensor t, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : tensor(t)) w = dist(rng);
    };
    init(Conv1W, StateTensor::layers * k2, shape.filters1 * k2);
    init(Conv2W, shape.filters1 * k2, shape.filters2 * k2);
    init(Dense1W, shape.flat_features(), shape.hidden);
    init(OutW, shape.hidden, action_count);
}

std::span<double> QNetwork::tensor(Tensor t) {
    return std::span<double>(params_).subspan(offsets_[t], offsets_[t + 1] - offsets_[t]);
}

std::span<const double> QNetwork::tensor(Tensor t) const {
    return std::span<const double>(params_).subspan(offsets_[t], offsets_[t + 1] - offsets_[t]);
}

const char* QNetwork::tensor_name(Tensor t) {
    static constexpr const char* names[TensorCount] = {"conv1.weight", "conv1.bias",  "conv2.weight",
                                                       "conv2.bias",   "dense.weight", "dense.bias",
                                                       "out.weight",   "out.bias"};
    return names[t];
}

void QNetwork::check_input(const StateTensor& s) const {
    const int side = shape_.input_side();
    if (s.side != side || s.data.size() != static_cast<std::size_t>(StateTensor::layers * side * side))
        throw ShapeError("state tensor side " + std::to_string(s.side) + " does not match network input side " +
                         std::to_string(side));
}

namespace {

// Valid 3x3 convolution, input [cin][n][n] -> output [cout][n-2][n-2].
void conv3x3(const double* in, int cin, int n, const double* w, const double* b, int cout, double* out) {
    const int m = n - 2;
    for (int f = 0; f < cout; ++f) {
        double* o = out + static_cast<std::ptrdiff_t>(f) * m * m;
        std::fill(o, o + m * m, b[f]);
        for (int c = 0; c < cin; ++c) {
            const double* plane = in + static_cast<std::ptrdiff_t>(c) * n * n;
            const double* k = w + (static_cast<std::ptrdiff_t>(f) * cin + c) * 9;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const double* p = plane + i * n + j;
                    o[i * m + j] += k[0] * p[0] + k[1] * p[1] + k[2] * p[2] + k[3] * p[n] + k[4] * p[n + 1] +
                                    k[5] * p[n + 2] + k[6] * p[2 * n] + k[7] * p[2 * n + 1] + k[8] * p[2 * n + 2];
                }
        }
    }
}

// Backward of conv3x3 given d(out); accumulates into dw, db and (if non-null) din.
void conv3x3_backward(const double* in, int cin, int n, const double* w, int cout, const double* dout, double* dw,
                      double* db, double* din) {
    const int m = n - 2;
    for (int f = 0; f < cout; ++f) {
        const double* g = dout + static_cast<std::ptrdiff_t>(f) * m * m;
        for (int i = 0; i < m * m; ++i) db[f] += g[i];
        for (int c = 0; c < cin; ++c) {
            const double* plane = in + static_cast<std::ptrdiff_t>(c) * n * n;
            const std::ptrdiff_t kofs = (static_cast<std::ptrdiff_t>(f) * cin + c) * 9;
            double* dk = dw + kofs;
            const double* k = w + kofs;
            double* dplane = din ? din + static_cast<std::ptrdiff_t>(c) * n * n : nullptr;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const double gij = g[i * m + j];
                    if (gij == 0.0) continue;
                    for (int ki = 0; ki < 3; ++ki)
                        for (int kj = 0; kj < 3; ++kj) {
                            dk[ki * 3 + kj] += gij * plane[(i + ki) * n + j + kj];
                            if (dplane) dplane[(i + ki) * n + j + kj] += gij * k[ki * 3 + kj];
                        }
                }
        }
    }
}

void relu_dropout(const std::vector<double>& pre, std::vector<double>& mask, std::vector<double>& out,
                  double dropout, Rng* rng) {
    out.resize(pre.size());
    mask.assign(pre.size(), 1.0);
    if (rng && dropout > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double keep = 1.0 / (1.0 - dropout);
        for (double& m : mask) m = u(*rng) < dropout ? 0.0 : keep;
    }
    for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] * mask[i] : 0.0;
}

}  // namespace

QValues QNetwork::run(const StateTensor& s, Workspace& ws, double dropout, Rng* rng) const {
    check_input(s);
    const QNetworkShape& sh = shape_;
    const int n0 = sh.input_side(), n1 = sh.conv1_side(), n2 = sh.conv2_side();

    ws.a1.resize(static_cast<std::size_t>(sh.filters1 * n1 * n1));
    conv3x3(s.data.data(), StateTensor::layers, n0, tensor(Conv1W).data(), tensor(Conv1B).data(), sh.filters1,
            ws.a1.data());
    relu_dropout(ws.a1, ws.m1, ws.h1, dropout, rng);

    ws.a2.resize(static_cast<std::size_t>(sh.filters2 * n2 * n2));
    conv3x3(ws.h1.data(), sh.filters1, n1, tensor(Conv2W).data(), tensor(Conv2B).data(), sh.filters2,
            ws.a2.data());
    relu_dropout(ws.a2, ws.m2, ws.h2, dropout, rng);

    const int nf = sh.flat_features();
    const double* w3 = tensor(Dense1W).data();
    const double* b3 = tensor(Dense1B).data();
    ws.a3.resize(static_cast<std::size_t>(sh.hidden));
    ws.h3.resize(static_cast<std::size_t>(sh.hidden));
    for (int h = 0; h < sh.hidden; ++h) {
        double acc = b3[h];
        const double* row = w3 + static_cast<std::ptrdiff_t>(h) * nf;
        for (int k = 0; k < nf; ++k) acc += row[k] * ws.h2[static_cast<std::size_t>(k)];
        ws.a3[static_cast<std::size_t>(h)] = acc;
        ws.h3[static_cast<std::size_t>(h)] = acc > 0.0 ? acc : 0.0;
    }

    const double* w4 = tensor(OutW).data();
    const double* b4 = tensor(OutB).data();
    for (int a = 0; a < action_count; ++a) {
        double acc = b4[a];
        for (int h = 0; h < sh.hidden; ++h) acc += w4[a * sh.hidden + h] * ws.h3[static_cast<std::size_t>(h)];
        ws.q[static_cast<std::size_t>(a)] = acc;
    }
    return ws.q;
}

QValues QNetwork::forward(const StateTensor& s) const {
    Workspace ws;
    return run(s, ws, 0.0, nullptr);
}

std::vector<QValues> QNetwork::forward(std::span<const StateTensor> batch) const {
    Workspace ws;
    std::vector<QValues> out;
    out.reserve(batch.size());
    for (const auto& s : batch) out.push_back(run(s, ws, 0.0, nullptr));
    return out;
}

std::vector<QValues> QNetwork::forward_train(std::span<const StateTensor> batch, double dropout, Rng& rng) const {
    Workspace ws;
    std::vector<QValues> out;
    out.reserve(batch.size());
    for (const auto& s : batch) out.push_back(run(s, ws, dropout, &rng));
    return out;
}

double QNetwork::loss_and_gradient(std::span<const StateTensor> states, std::span<const Action> actions,
                                   std::span<const double> targets, std::span<double> grad, double dropout,
                                   Rng* rng) const {
    if (states.size() != actions.size() || states.size() != targets.size())
        throw ContractError("batch components differ in length");
    if (grad.size() != params_.size()) throw ShapeError("gradient buffer does not match parameter count");
    std::fill(grad.begin(), grad.end(), 0.0);
    if (states.empty()) return 0.0;

    const QNetworkShape& sh = shape_;
    const int n1 = sh.conv1_side(), nf = sh.flat_features();
    const double inv_batch = 1.0 / static_cast<double>(states.size());
    auto g = [&](Tensor t) { return grad.data() + offsets_[t]; };

    Workspace ws;
    std::vector<double> dh3(static_cast<std::size_t>(sh.hidden)), dh2, dh1;
    double loss = 0.0;
    for (std::size_t b = 0; b < states.size(); ++b) {
        const QValues q = run(states[b], ws, dropout, rng);
        const int a = static_cast<int>(actions[b]);
        const double err = q[static_cast<std::size_t>(a)] - targets[b];
        loss += err * err * inv_batch;
        const double dq = 2.0 * err * inv_batch;

        // output layer: only the taken action's row carries gradient
        g(OutB)[a] += dq;
        const double* w4 = tensor(OutW).data() + a * sh.hidden;
        double* dw4 = g(OutW) + a * sh.hidden;
        for (int h = 0; h < sh.hidden; ++h) {
            const auto hu = static_cast<std::size_t>(h);
            dw4[h] += dq * ws.h3[hu];
            dh3[hu] = ws.a3[hu] > 0.0 ? dq * w4[h] : 0.0;
        }

        dh2.assign(static_cast<std::size_t>(nf), 0.0);
        const double* w3 = tensor(Dense1W).data();
        double* dw3 = g(Dense1W);
        for (int h = 0; h < sh.hidden; ++h) {
            const double d = dh3[static_cast<std::size_t>(h)];
            if (d == 0.0) continue;
            g(Dense1B)[h] += d;
            const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(h) * nf;
            for (int k = 0; k < nf; ++k) {
                dw3[row + k] += d * ws.h2[static_cast<std::size_t>(k)];
                dh2[static_cast<std::size_t>(k)] += d * w3[row + k];
            }
        }
        // through dropout mask and ReLU of conv2
        for (std::size_t k = 0; k < dh2.size(); ++k) dh2[k] = ws.a2[k] > 0.0 ? dh2[k] * ws.m2[k] : 0.0;

        dh1.assign(static_cast<std::size_t>(sh.filters1 * n1 * n1), 0.0);
        conv3x3_backward(ws.h1.data(), sh.filters1, n1, tensor(Conv2W).data(), sh.filters2, dh2.data(), g(Conv2W),
                         g(Conv2B), dh1.data());
        for (std::size_t k = 0; k < dh1.size(); ++k) dh1[k] = ws.a1[k] > 0.0 ? dh1[k] * ws.m1[k] : 0.0;

        conv3x3_backward(states[b].data.data(), StateTensor::layers, sh.input_side(), tensor(Conv1W).data(),
                         sh.filters1, dh1.data(), g(Conv1W), g(Conv1B), nullptr);
    }
    return loss;
}

std::string QNetwork::save() const {
    std::string out(magic, sizeof magic);
    put_u32(out, format_version);
    put_u32(out, static_cast<std::uint32_t>(shape_.K));
    put_u32(out, static_cast<std::uint32_t>(shape_.filters1));
    put_u32(out, static_cast<std::uint32_t>(shape_.filters2));
    put_u32(out, static_cast<std::uint32_t>(shape_.hidden));
    put_u32(out, TensorCount);
    for (int t = 0; t < TensorCount; ++t) {
        const auto view = tensor(static_cast<Tensor>(t));
        put_u64(out, view.size());
        for (double v : view) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

QNetwork QNetwork::load(std::string_view bytes) {
    Reader in(bytes);
    if (in.take(sizeof magic) != std::string_view(magic, sizeof magic)) throw ParseError("not a Q-network weight file");
    if (const auto v = in.get(4); v != format_version)
        throw ParseError("unsupported weight file version " + std::to_string(v));
    QNetworkShape shape;
    shape.K = static_cast<int>(in.get(4));
    shape.filters1 = static_cast<int>(in.get(4));
    shape.filters2 = static_cast<int>(in.get(4));
    shape.hidden = static_cast<int>(in.get(4));
    if (in.get(4) != TensorCount) throw ShapeError("weight file has an unexpected tensor count");
    QNetwork net(shape);
    for (int t = 0; t < TensorCount; ++t) {
        auto view = net.tensor(static_cast<Tensor>(t));
        if (in.get(8) != view.size())
            throw ShapeError(std::string("weight file tensor ") + tensor_name(static_cast<Tensor>(t)) +
                             " has the wrong size");
        for (double& v : view) v = std::bit_cast<double>(in.get(8));
    }
    if (!in.done()) throw ParseError("trailing bytes after weight data");
    return net;
}

}  // namespace cityplan
