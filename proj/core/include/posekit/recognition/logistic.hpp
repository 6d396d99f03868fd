#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "posekit/recognition/embedding.hpp"

namespace posekit::recognition {

// Multinomial logistic regression: p = softmax(W e + b).
class LogisticModel {
public:
    LogisticModel() = default;
    // `weights` is classes x dim, row-major. Throws InvalidParameter on
    // inconsistent sizes or non-finite values.
    LogisticModel(std::vector<std::string> class_labels, std::size_t dim,
                  std::vector<float> weights, std::vector<float> biases);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t class_count() const noexcept { return labels_.size(); }
    const std::vector<std::string> &class_labels() const noexcept { return labels_; }
    const std::vector<float> &weights() const noexcept { return weights_; }
    const std::vector<float> &biases() const noexcept { return biases_; }
    float weight(std::size_t cls, std::size_t d) const { return weights_[cls * dim_ + d]; }

    friend bool operator==(const LogisticModel &, const LogisticModel &) = default;

private:
    std::vector<std::string> labels_;
    std::size_t dim_ = 0;
    std::vector<float> weights_;
    std::vector<float> biases_;
};

struct TrainParams {
    double l2 = 1e-4;  // penalty (l2 / 2) * |W|^2, biases not penalised
    std::size_t max_epochs = 500;
    double gradient_tolerance = 1e-5;
    double initial_step = 1.0;
    double armijo = 1e-4;
};

struct TrainReport {
    // Regularised mean cross-entropy at the start and after every accepted
    // step. Non-increasing by construction.
    std::vector<double> loss_history;
    std::size_t epochs = 0;
    double final_gradient_norm = 0.0;
    bool converged = false;
};

// Full-batch gradient descent from zero with backtracking (Armijo) steps.
// Classes are the distinct labels in sorted order. Throws SingleClass for
// fewer than two classes, DimensionMismatch for inconsistent embeddings and
// InvalidParameter for empty or mismatched inputs.
LogisticModel train_classifier(std::span<const Embedding> embeddings,
                               std::span<const std::string> labels,
                               const TrainParams &params = {}, TrainReport *report = nullptr);

struct Prediction {
    std::string label;
    std::size_t class_index = 0;
    std::vector<double> probabilities;
};

// Softmax in double precision; argmax takes the lowest index on ties.
// Throws DimensionMismatch.
Prediction predict(const LogisticModel &model, const Embedding &e);

// Raw logits W e + b.
std::vector<double> logits(const LogisticModel &model, const Embedding &e);

// File format: one line of JSON {"format", "version", "dim", "labels"}, then
// classes*dim weights and classes biases as little-endian float32.
void save_model(const std::filesystem::path &path, const LogisticModel &model);
LogisticModel load_model(const std::filesystem::path &path);

}  // namespace posekit::recognition
