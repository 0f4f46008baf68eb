#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "wtda/error.hpp"

namespace wtda {

struct MLPModel {
    Eigen::MatrixXd W1;  // input_dim x hidden
    Eigen::VectorXd b1;  // hidden
    Eigen::MatrixXd W2;  // hidden x classes
    Eigen::VectorXd b2;  // classes

    // optional input standardization fitted on the training set; empty = off
    Eigen::VectorXd feat_mean;
    Eigen::VectorXd feat_std;

    int input_dim() const { return int(W1.rows()); }
    int hidden_dim() const { return int(W1.cols()); }
    int num_classes() const { return int(W2.cols()); }
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 700;
    int batch_size = 32;
    std::uint64_t seed = 0;
    bool standardize = false;

    void validate() const;
};

struct Gradients {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
};

struct AdamState {
    Gradients m;  // first moments
    Gradients v;  // second moments
    long t = 0;

    static AdamState zeros_like(const MLPModel& model);
};

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<long>> confusion;  // [true][pred]
    std::vector<double> train_acc, train_loss, val_acc, val_loss;  // per epoch
    std::vector<double> epoch_seconds;
};

// Weights uniform on [-sqrt(3/fan_in), sqrt(3/fan_in)] (std 1/sqrt(fan_in)),
// biases zero.
MLPModel init_model(std::uint64_t seed, int input_dim = 800, int hidden = 1024, int classes = 5);

// Row-wise softmax class probabilities. X is n x input_dim.
Eigen::MatrixXd forward(const MLPModel& model, const Eigen::MatrixXd& X);

// Mean softmax cross-entropy and its gradients. If `correct_out` is set it
// receives the number of argmax hits under the current weights.
std::pair<double, Gradients> loss_and_grad(const MLPModel& model, const Eigen::MatrixXd& X,
                                           const std::vector<int>& labels,
                                           std::size_t* correct_out = nullptr);

void adam_step(MLPModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

std::pair<MLPModel, EvalReport> train(const Eigen::MatrixXd& X_train,
                                      const std::vector<int>& y_train,
                                      const Eigen::MatrixXd& X_val, const std::vector<int>& y_val,
                                      const TrainConfig& cfg);

EvalReport evaluate(const MLPModel& model, const Eigen::MatrixXd& X,
                    const std::vector<int>& y);

std::vector<int> predict(const MLPModel& model, const Eigen::MatrixXd& X);

}  // namespace wtda
