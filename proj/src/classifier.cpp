#include "wtda/classifier.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "wtda/rng.hpp"

namespace wtda {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidParameter("TrainConfig: learning_rate must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw InvalidParameter("TrainConfig: betas must be in [0, 1)");
    if (epochs < 1) throw InvalidParameter("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw InvalidParameter("TrainConfig: batch_size must be >= 1");
}

AdamState AdamState::zeros_like(const MLPModel& model) {
    AdamState s;
    for (Gradients* g : {&s.m, &s.v}) {
        g->W1 = Eigen::MatrixXd::Zero(model.W1.rows(), model.W1.cols());
        g->b1 = Eigen::VectorXd::Zero(model.b1.size());
        g->W2 = Eigen::MatrixXd::Zero(model.W2.rows(), model.W2.cols());
        g->b2 = Eigen::VectorXd::Zero(model.b2.size());
    }
    return s;
}

MLPModel init_model(std::uint64_t seed, int input_dim, int hidden, int classes) {
    Rng rng(seed);
    MLPModel m;
    const double a1 = std::sqrt(3.0 / input_dim);
    const double a2 = std::sqrt(3.0 / hidden);
    m.W1.resize(input_dim, hidden);
    for (int i = 0; i < input_dim; ++i)
        for (int j = 0; j < hidden; ++j) m.W1(i, j) = rng.uniform(-a1, a1);
    m.W2.resize(hidden, classes);
    for (int i = 0; i < hidden; ++i)
        for (int j = 0; j < classes; ++j) m.W2(i, j) = rng.uniform(-a2, a2);
    m.b1 = Eigen::VectorXd::Zero(hidden);
    m.b2 = Eigen::VectorXd::Zero(classes);
    return m;
}

namespace {

Eigen::MatrixXd standardized(const MLPModel& model, const Eigen::MatrixXd& X) {
    if (model.feat_mean.size() == 0) return X;
    return (X.rowwise() - model.feat_mean.transpose()).array().rowwise() /
           model.feat_std.transpose().array();
}

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
    const Eigen::VectorXd rowmax = logits.rowwise().maxCoeff();
    logits.colwise() -= rowmax;
    Eigen::MatrixXd e = logits.array().exp();
    const Eigen::VectorXd sums = e.rowwise().sum();
    e.array().colwise() /= sums.array();
    return e;
}

void check_shape(const MLPModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.input_dim())
        throw ShapeError("forward: feature length " + std::to_string(X.cols()) +
                         " != " + std::to_string(model.input_dim()));
}

}  // namespace

Eigen::MatrixXd forward(const MLPModel& model, const Eigen::MatrixXd& X) {
    check_shape(model, X);
    const Eigen::MatrixXd Xs = standardized(model, X);
    Eigen::MatrixXd H = (Xs * model.W1).rowwise() + model.b1.transpose();
    H = H.cwiseMax(0.0);  // ReLU
    const Eigen::MatrixXd logits = (H * model.W2).rowwise() + model.b2.transpose();
    return softmax_rows(logits);
}

std::pair<double, Gradients> loss_and_grad(const MLPModel& model, const Eigen::MatrixXd& X,
                                           const std::vector<int>& labels,
                                           std::size_t* correct_out) {
    check_shape(model, X);
    const auto n = X.rows();
    if (Eigen::Index(labels.size()) != n)
        throw ShapeError("loss_and_grad: label count mismatch");
    for (int y : labels)
        if (y < 0 || y >= model.num_classes())
            throw LabelError("loss_and_grad: label out of range: " + std::to_string(y));

    const Eigen::MatrixXd Xs = standardized(model, X);
    Eigen::MatrixXd Z = (Xs * model.W1).rowwise() + model.b1.transpose();
    const Eigen::MatrixXd H = Z.cwiseMax(0.0);
    const Eigen::MatrixXd logits = (H * model.W2).rowwise() + model.b2.transpose();
    Eigen::MatrixXd probs = softmax_rows(logits);

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        loss -= std::log(std::max(probs(i, labels[i]), 1e-300));
    loss /= double(n);
    if (correct_out) {
        std::size_t hits = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index arg;
            probs.row(i).maxCoeff(&arg);
            hits += int(arg) == labels[i];
        }
        *correct_out = hits;
    }

    // dlogits = (probs - onehot) / n
    for (Eigen::Index i = 0; i < n; ++i) probs(i, labels[i]) -= 1.0;
    probs /= double(n);

    Gradients g;
    g.W2 = H.transpose() * probs;
    g.b2 = probs.colwise().sum();
    Eigen::MatrixXd dH = probs * model.W2.transpose();
    dH = (Z.array() > 0.0).select(dH, 0.0);
    g.W1 = Xs.transpose() * dH;
    g.b1 = dH.colwise().sum();
    return {loss, std::move(g)};
}

void adam_step(MLPModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
    cfg.validate();
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square();
        param.array() -=
            cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.eps);
    };
    update(model.W1, grads.W1, state.m.W1, state.v.W1);
    update(model.b1, grads.b1, state.m.b1, state.v.b1);
    update(model.W2, grads.W2, state.m.W2, state.v.W2);
    update(model.b2, grads.b2, state.m.b2, state.v.b2);
}

std::vector<int> predict(const MLPModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd probs = forward(model, X);
    std::vector<int> out(probs.rows());
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        Eigen::Index arg;
        probs.row(i).maxCoeff(&arg);
        out[i] = int(arg);
    }
    return out;
}

namespace {

double accuracy_of(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += pred[i] == truth[i];
    return double(hits) / double(truth.size());
}

}  // namespace

std::pair<MLPModel, EvalReport> train(const Eigen::MatrixXd& X_train,
                                      const std::vector<int>& y_train,
                                      const Eigen::MatrixXd& X_val, const std::vector<int>& y_val,
                                      const TrainConfig& cfg) {
    cfg.validate();
    if (X_train.rows() == 0) throw InvalidInput("train: empty training set");
    if (Eigen::Index(y_train.size()) != X_train.rows())
        throw ShapeError("train: label count mismatch");

    MLPModel model = init_model(cfg.seed, int(X_train.cols()));
    if (cfg.standardize) {
        model.feat_mean = X_train.colwise().mean();
        Eigen::VectorXd var =
            (X_train.rowwise() - model.feat_mean.transpose()).array().square().colwise().mean();
        model.feat_std = (var.array() + 1e-12).sqrt();
    }
    AdamState state = AdamState::zeros_like(model);
    Rng shuffle_rng(splitmix64(cfg.seed ^ 0x73687566666c65ULL));
    EvalReport report;

    const auto n = X_train.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        // Fisher-Yates with the seeded stream
        for (Eigen::Index i = n - 1; i > 0; --i)
            std::swap(order[i], order[std::size_t(shuffle_rng.uniform_int(0, i))]);

        double epoch_loss = 0.0;
        std::size_t epoch_hits = 0;
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - start);
            Eigen::MatrixXd Xb(bs, X_train.cols());
            std::vector<int> yb(bs);
            for (Eigen::Index r = 0; r < bs; ++r) {
                Xb.row(r) = X_train.row(order[start + r]);
                yb[r] = y_train[order[start + r]];
            }
            // batch accuracy with pre-update weights, accumulated over the epoch
            std::size_t hits = 0;
            auto [loss, grads] = loss_and_grad(model, Xb, yb, &hits);
            if (!std::isfinite(loss)) throw InvalidInput("train: non-finite loss");
            epoch_loss += loss * double(bs);
            epoch_hits += hits;
            adam_step(model, grads, state, cfg);
        }
        report.train_loss.push_back(epoch_loss / double(n));
        report.train_acc.push_back(double(epoch_hits) / double(n));
        if (X_val.rows() > 0) {
            const Eigen::MatrixXd probs = forward(model, X_val);
            double vloss = 0.0;
            std::size_t vhits = 0;
            for (Eigen::Index i = 0; i < probs.rows(); ++i) {
                vloss -= std::log(std::max(probs(i, y_val[i]), 1e-300));
                Eigen::Index arg;
                probs.row(i).maxCoeff(&arg);
                vhits += int(arg) == y_val[i];
            }
            report.val_loss.push_back(vloss / double(probs.rows()));
            report.val_acc.push_back(double(vhits) / double(probs.rows()));
        }
        report.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return {std::move(model), std::move(report)};
}

EvalReport evaluate(const MLPModel& model, const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (X.rows() == 0) throw InvalidInput("evaluate: empty test set");
    EvalReport report;
    const int k = model.num_classes();
    report.confusion.assign(k, std::vector<long>(k, 0));
    const std::vector<int> pred = predict(model, X);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0 || y[i] >= k) throw LabelError("evaluate: label out of range");
        ++report.confusion[y[i]][pred[i]];
    }
    report.accuracy = accuracy_of(pred, y);
    return report;
}

}  // namespace wtda
