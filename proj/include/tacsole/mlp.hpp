#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/poisson.hpp"
#include "tacsole/rng.hpp"

// Per-pixel gradient predictor: a small MLP mapping (r, g, b, x, y) to
// (gx, gy). Input 5 -> 64 -> 64 -> 64 -> output 2, ReLU activations,
// dropout 0.1 on hidden units at train time only. Trained with seeded
// mini-batch SGD; two runs with the same data and seed produce identical
// weights.

namespace tacsole {

inline constexpr int kMlpInputDim = 5;
inline constexpr int kMlpOutputDim = 2;
inline constexpr std::array<int, 5> kMlpDims{5, 64, 64, 64, 2};

struct GradientSample {
    std::array<double, kMlpInputDim> input;   // normalized (r, g, b, x, y)
    std::array<double, kMlpOutputDim> target; // (gx, gy)
};

struct GradientModel {
    // weights[l] is row-major dims[l+1] x dims[l]; biases[l] has dims[l+1].
    std::array<int, 5> dims = kMlpDims;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    // Feature normalization applied before the first layer:
    // normalized = (raw - offset) * scale. Raw features are
    // (r, g, b, col, row) with color in 0..255 and coordinates in pixels.
    std::array<double, kMlpInputDim> input_offset{0, 0, 0, 0, 0};
    std::array<double, kMlpInputDim> input_scale{1, 1, 1, 1, 1};
    double dropout_rate = 0.1; // train-time only
    double momentum = 0.9;     // recorded with the model
    std::uint64_t seed = 0;

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }

    void init(std::uint64_t init_seed)
    {
        seed = init_seed;
        Rng rng = make_rng(init_seed);
        weights.clear();
        biases.clear();
        for (int l = 0; l < layer_count(); ++l) {
            int fan_in = dims[l], fan_out = dims[l + 1];
            double bound = std::sqrt(6.0 / (fan_in + fan_out));
            std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
            for (double& x : w) x = uniform(rng, -bound, bound);
            weights.push_back(std::move(w));
            biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
        }
    }

    // Forward pass on a normalized input; inference path, no dropout.
    std::array<double, kMlpOutputDim> forward(const std::array<double, kMlpInputDim>& in) const
    {
        std::vector<double> cur(in.begin(), in.end());
        std::vector<double> next;
        for (int l = 0; l < layer_count(); ++l) {
            int n_out = dims[l + 1], n_in = dims[l];
            next.assign(static_cast<std::size_t>(n_out), 0.0);
            const double* w = weights[l].data();
            for (int o = 0; o < n_out; ++o) {
                double acc = biases[l][o];
                const double* row = w + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) acc += row[i] * cur[i];
                if (l + 1 < layer_count() && acc < 0.0) acc = 0.0; // ReLU on hidden layers
                next[o] = acc;
            }
            cur.swap(next);
        }
        return {cur[0], cur[1]};
    }

    std::array<double, kMlpInputDim> normalize(double r, double g, double b, double col,
                                               double row) const
    {
        std::array<double, kMlpInputDim> raw{r, g, b, col, row};
        std::array<double, kMlpInputDim> out;
        for (int i = 0; i < kMlpInputDim; ++i)
            out[i] = (raw[i] - input_offset[i]) * input_scale[i];
        return out;
    }

    // Standard normalization for a given ROI: color to [0,1], pixel
    // coordinates to [0,1] by the ROI dimensions.
    void set_roi_normalization(int width, int height)
    {
        input_offset = {0, 0, 0, 0, 0};
        input_scale = {1.0 / 255.0, 1.0 / 255.0, 1.0 / 255.0,
                       1.0 / std::max(1, width - 1), 1.0 / std::max(1, height - 1)};
    }
};

struct MlpTrainConfig {
    int epochs = 30;
    int batch_size = 64;
    double learning_rate = 0.001;
    double momentum = 0.9;
    double dropout_rate = 0.1;
    std::uint64_t seed = 1;
    bool eval_each_epoch = false; // extra dropout-off train MSE per epoch
};

struct MlpTrainReport {
    std::vector<double> epoch_train_mse; // running mean over the epoch's batches
    std::vector<double> epoch_eval_mse;  // filled when eval_each_epoch is set
    double final_train_mse = 0.0;        // full pass, dropout off
    double final_test_mse = 0.0;
};

// Mean squared error per scalar output, dropout disabled.
inline double evaluate_mse(const GradientModel& model, std::span<const GradientSample> samples)
{
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const GradientSample& s : samples) {
        auto y = model.forward(s.input);
        for (int k = 0; k < kMlpOutputDim; ++k) {
            double d = y[k] - s.target[k];
            acc += d * d;
        }
    }
    return acc / (static_cast<double>(samples.size()) * kMlpOutputDim);
}

namespace detail {

struct MlpWorkspace {
    // Activations per layer (post-ReLU), pre-activation masks for the
    // dropout/ReLU backward pass, and gradient accumulators.
    std::vector<std::vector<double>> act;       // act[0] = input, act[L] = output
    std::vector<std::vector<double>> delta;     // back-propagated errors
    std::vector<std::vector<double>> drop_keep; // dropout scaling per hidden unit
    std::vector<std::vector<double>> grad_w;
    std::vector<std::vector<double>> grad_b;
    std::vector<std::vector<double>> vel_w;
    std::vector<std::vector<double>> vel_b;

    explicit MlpWorkspace(const GradientModel& m)
    {
        int L = m.layer_count();
        act.resize(static_cast<std::size_t>(L) + 1);
        delta.resize(static_cast<std::size_t>(L) + 1);
        drop_keep.resize(static_cast<std::size_t>(L) + 1);
        for (int l = 0; l <= L; ++l) {
            act[l].assign(static_cast<std::size_t>(m.dims[l]), 0.0);
            delta[l].assign(static_cast<std::size_t>(m.dims[l]), 0.0);
            drop_keep[l].assign(static_cast<std::size_t>(m.dims[l]), 1.0);
        }
        for (int l = 0; l < L; ++l) {
            grad_w.emplace_back(m.weights[l].size(), 0.0);
            grad_b.emplace_back(m.biases[l].size(), 0.0);
            vel_w.emplace_back(m.weights[l].size(), 0.0);
            vel_b.emplace_back(m.biases[l].size(), 0.0);
        }
    }
};

// Forward + backward for one sample; accumulates parameter gradients of
// the squared-error loss (sum over the two outputs, caller scales).
inline double backprop_sample(const GradientModel& m, const GradientSample& s, MlpWorkspace& ws,
                              bool use_dropout, Rng& rng)
{
    int L = m.layer_count();
    for (int i = 0; i < kMlpInputDim; ++i) ws.act[0][i] = s.input[i];

    for (int l = 0; l < L; ++l) {
        int n_out = m.dims[l + 1], n_in = m.dims[l];
        const double* w = m.weights[l].data();
        const std::vector<double>& in = ws.act[l];
        std::vector<double>& out = ws.act[l + 1];
        std::vector<double>& keep = ws.drop_keep[l + 1];
        bool hidden = l + 1 < L;
        for (int o = 0; o < n_out; ++o) {
            double acc = m.biases[l][o];
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) acc += row[i] * in[i];
            if (hidden) {
                if (acc < 0.0) acc = 0.0;
                double k = 1.0;
                if (use_dropout && m.dropout_rate > 0.0) {
                    // Inverted dropout: zero with prob p, else scale 1/(1-p).
                    k = (uniform(rng, 0.0, 1.0) < m.dropout_rate)
                            ? 0.0
                            : 1.0 / (1.0 - m.dropout_rate);
                }
                keep[o] = k;
                acc *= k;
            }
            out[o] = acc;
        }
    }

    double loss = 0.0;
    for (int k = 0; k < kMlpOutputDim; ++k) {
        double d = ws.act[L][k] - s.target[k];
        loss += d * d;
        ws.delta[L][k] = 2.0 * d;
    }

    for (int l = L - 1; l >= 0; --l) {
        int n_out = m.dims[l + 1], n_in = m.dims[l];
        const double* w = m.weights[l].data();
        std::vector<double>& din = ws.delta[l];
        const std::vector<double>& dout = ws.delta[l + 1];
        const std::vector<double>& in = ws.act[l];
        din.assign(static_cast<std::size_t>(n_in), 0.0);
        for (int o = 0; o < n_out; ++o) {
            double d = dout[o];
            if (d == 0.0) continue;
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            double* gw = ws.grad_w[l].data() + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) {
                gw[i] += d * in[i];
                din[i] += d * row[i];
            }
            ws.grad_b[l][o] += d;
        }
        if (l > 0) {
            // Through dropout scaling and ReLU: act already includes the
            // keep factor, so a zeroed/negative unit contributes nothing.
            const std::vector<double>& keep = ws.drop_keep[l];
            for (int i = 0; i < n_in; ++i) {
                if (ws.act[l][i] == 0.0)
                    din[i] = 0.0;
                else
                    din[i] *= keep[i];
            }
        }
    }
    return loss;
}

} // namespace detail

// Train on the given samples. Deterministic for a fixed (data, config.seed).
inline MlpTrainReport train_gradient_mlp(GradientModel& model,
                                         std::span<const GradientSample> train,
                                         std::span<const GradientSample> test,
                                         const MlpTrainConfig& config)
{
    if (train.empty()) throw data_error("train_gradient_mlp: empty training set");
    model.dims = kMlpDims;
    model.dropout_rate = config.dropout_rate;
    model.momentum = config.momentum;
    model.init(config.seed);

    detail::MlpWorkspace ws(model);
    Rng rng = make_rng(config.seed ^ 0xa0761d6478bd642full);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    MlpTrainReport report;
    int L = model.layer_count();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t batch = std::min<std::size_t>(config.batch_size, order.size() - pos);
            for (int l = 0; l < L; ++l) {
                std::fill(ws.grad_w[l].begin(), ws.grad_w[l].end(), 0.0);
                std::fill(ws.grad_b[l].begin(), ws.grad_b[l].end(), 0.0);
            }
            double batch_loss = 0.0;
            for (std::size_t k = 0; k < batch; ++k)
                batch_loss += detail::backprop_sample(model, train[order[pos + k]], ws, true, rng);
            // Loss is the mean squared error per scalar output.
            double scale = 1.0 / (static_cast<double>(batch) * kMlpOutputDim);
            epoch_loss += batch_loss * scale * batch;
            if (!std::isfinite(batch_loss))
                throw divergence_error("train_gradient_mlp: non-finite training loss");
            for (int l = 0; l < L; ++l) {
                double* w = model.weights[l].data();
                double* v = ws.vel_w[l].data();
                const double* gw = ws.grad_w[l].data();
                for (std::size_t k = 0; k < model.weights[l].size(); ++k) {
                    v[k] = config.momentum * v[k] - config.learning_rate * gw[k] * scale;
                    w[k] += v[k];
                }
                double* bb = model.biases[l].data();
                double* vb = ws.vel_b[l].data();
                const double* gb = ws.grad_b[l].data();
                for (std::size_t k = 0; k < model.biases[l].size(); ++k) {
                    vb[k] = config.momentum * vb[k] - config.learning_rate * gb[k] * scale;
                    bb[k] += vb[k];
                }
            }
            pos += batch;
        }
        report.epoch_train_mse.push_back(epoch_loss / static_cast<double>(train.size()));
        if (config.eval_each_epoch) report.epoch_eval_mse.push_back(evaluate_mse(model, train));
    }
    report.final_train_mse = evaluate_mse(model, train);
    report.final_test_mse = evaluate_mse(model, test);
    return report;
}

// One (gx, gy) prediction per pixel; dropout disabled.
inline GradientField predict_gradients(const GradientModel& model, const TactileFrame& frame)
{
    if (model.weights.empty()) throw model_error("predict_gradients: model not trained");
    int w = frame.width(), h = frame.height();
    GradientField out;
    out.gx = FieldF64(w, h);
    out.gy = FieldF64(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            auto in = model.normalize(frame.pixels.at(r, c, 0), frame.pixels.at(r, c, 1),
                                      frame.pixels.at(r, c, 2), c, r);
            auto y = model.forward(in);
            out.gx.at(r, c) = y[0];
            out.gy.at(r, c) = y[1];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model file: magic "TACMLP1", little-endian layer dims, row-major weight
// matrices and bias vectors as 64-bit floats, then normalization
// constants, dropout, momentum and seed. Round-trips bit-exactly.

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v)
{
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& out, double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

inline std::uint32_t get_u32(std::istream& in)
{
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw io_error("model file: truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& in)
{
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw io_error("model file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& in)
{
    std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace detail

inline void save_gradient_model(const GradientModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("model file: cannot open for writing: " + path);
    out.write("TACMLP1", 7);
    detail::put_u32(out, static_cast<std::uint32_t>(model.dims.size()));
    for (int d : model.dims) detail::put_u32(out, static_cast<std::uint32_t>(d));
    for (int l = 0; l < model.layer_count(); ++l) {
        for (double v : model.weights[l]) detail::put_f64(out, v);
        for (double v : model.biases[l]) detail::put_f64(out, v);
    }
    for (double v : model.input_offset) detail::put_f64(out, v);
    for (double v : model.input_scale) detail::put_f64(out, v);
    detail::put_f64(out, model.dropout_rate);
    detail::put_f64(out, model.momentum);
    detail::put_u64(out, model.seed);
    if (!out) throw io_error("model file: short write: " + path);
}

inline GradientModel load_gradient_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("model file: cannot open: " + path);
    char magic[7];
    in.read(magic, 7);
    if (!in || std::string(magic, 7) != "TACMLP1")
        throw model_error("model file: bad magic (expected TACMLP1): " + path);
    GradientModel model;
    std::uint32_t n_dims = detail::get_u32(in);
    if (n_dims != model.dims.size()) throw model_error("model file: unexpected layer count");
    for (std::size_t i = 0; i < model.dims.size(); ++i) {
        std::uint32_t d = detail::get_u32(in);
        if (d != static_cast<std::uint32_t>(kMlpDims[i]))
            throw model_error("model file: layer shape mismatch");
        model.dims[i] = static_cast<int>(d);
    }
    for (int l = 0; l < model.layer_count(); ++l) {
        std::vector<double> w(static_cast<std::size_t>(model.dims[l]) * model.dims[l + 1]);
        for (double& v : w) v = detail::get_f64(in);
        model.weights.push_back(std::move(w));
        std::vector<double> b(static_cast<std::size_t>(model.dims[l + 1]));
        for (double& v : b) v = detail::get_f64(in);
        model.biases.push_back(std::move(b));
    }
    for (double& v : model.input_offset) v = detail::get_f64(in);
    for (double& v : model.input_scale) v = detail::get_f64(in);
    model.dropout_rate = detail::get_f64(in);
    model.momentum = detail::get_f64(in);
    model.seed = detail::get_u64(in);
    return model;
}

} // namespace tacsole
