#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cityplan/environment.hpp"

namespace cityplan {

using QValues = std::array<double, action_count>;

struct QNetworkShape {
    int K = 3;         // input side is 2K+1
    int filters1 = 16;
    int filters2 = 32;
    int hidden = 64;

    static constexpr int kernel = 3;
    int input_side() const { return 2 * K + 1; }
    int conv1_side() const { return input_side() - kernel + 1; }
    int conv2_side() const { return conv1_side() - kernel + 1; }
    int flat_features() const { return filters2 * conv2_side() * conv2_side(); }
    friend bool operator==(const QNetworkShape&, const QNetworkShape&) = default;
};

/// Q-value approximator: conv3x3 -> ReLU -> dropout -> conv3x3 -> ReLU ->
/// dropout -> dense -> ReLU -> dense(4). Valid (unpadded) convolutions, so
/// K must be at least 2. All parameters live in one flat buffer.
class QNetwork {
public:
    enum Tensor { Conv1W, Conv1B, Conv2W, Conv2B, Dense1W, Dense1B, OutW, OutB, TensorCount };

    /// Zero parameters.
    explicit QNetwork(const QNetworkShape& shape = {});
    /// Glorot-uniform weights, zero biases.
    QNetwork(const QNetworkShape& shape, Rng& rng);

    const QNetworkShape& shape() const { return shape_; }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::span<double> tensor(Tensor t);
    std::span<const double> tensor(Tensor t) const;
    static const char* tensor_name(Tensor t);

    /// Eval-mode forward; dropout off.
    QValues forward(const StateTensor& s) const;
    std::vector<QValues> forward(std::span<const StateTensor> batch) const;
    /// Train-mode forward with inverted dropout of rate `dropout`.
    std::vector<QValues> forward_train(std::span<const StateTensor> batch, double dropout, Rng& rng) const;

    /// Mean squared error between Q(s_b)[a_b] and y_b and its gradient with
    /// respect to every parameter (written to `grad`, same layout as params()).
    /// `rng == nullptr` disables dropout.
    double loss_and_gradient(std::span<const StateTensor> states, std::span<const Action> actions,
                             std::span<const double> targets, std::span<double> grad, double dropout,
                             Rng* rng) const;

    /// Versioned little-endian binary weight file.
    std::string save() const;
    static QNetwork load(std::string_view bytes);

private:
    struct Workspace;
    QValues run(const StateTensor& s, Workspace& ws, double dropout, Rng* rng) const;
    void check_input(const StateTensor& s) const;

    QNetworkShape shape_;
    std::array<std::size_t, TensorCount + 1> offsets_{};
    std::vector<double> params_;
};

}  // namespace cityplan
