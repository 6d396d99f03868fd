#include "posekit/recognition/logistic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "posekit/error.hpp"

namespace posekit::recognition {

static_assert(std::endian::native == std::endian::little);

LogisticModel::LogisticModel(std::vector<std::string> class_labels, std::size_t dim,
                             std::vector<float> weights, std::vector<float> biases)
    : labels_(std::move(class_labels)),
      dim_(dim),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
    if (labels_.empty() || dim_ == 0) {
        throw Error(ErrorCode::InvalidParameter, "model needs classes and a positive dim");
    }
    if (weights_.size() != labels_.size() * dim_ || biases_.size() != labels_.size()) {
        throw Error(ErrorCode::InvalidParameter, "model weight/bias sizes disagree with labels");
    }
    const auto finite = [](float v) { return std::isfinite(v); };
    if (!std::all_of(weights_.begin(), weights_.end(), finite) ||
        !std::all_of(biases_.begin(), biases_.end(), finite)) {
        throw Error(ErrorCode::InvalidParameter, "model holds non-finite values");
    }
}

namespace {

struct Problem {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::vector<double> x;         // n x dim
    std::vector<std::size_t> y;    // class index per sample
    double l2 = 0.0;
};

// theta = [W (classes x dim) | b (classes)]
double loss_and_gradient(const Problem &p, const std::vector<double> &theta,
                         std::vector<double> *grad) {
    const std::size_t kd = p.classes * p.dim;
    if (grad) grad->assign(theta.size(), 0.0);
    std::vector<double> z(p.classes);
    double loss = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        const double *xi = &p.x[i * p.dim];
        for (std::size_t c = 0; c < p.classes; ++c) {
            const double *w = &theta[c * p.dim];
            double s = theta[kd + c];
            for (std::size_t d = 0; d < p.dim; ++d) s += w[d] * xi[d];
            z[c] = s;
        }
        const double zmax = *std::max_element(z.begin(), z.end());
        double denom = 0.0;
        for (double v : z) denom += std::exp(v - zmax);
        const double log_denom = zmax + std::log(denom);
        loss += log_denom - z[p.y[i]];
        if (!grad) continue;
        for (std::size_t c = 0; c < p.classes; ++c) {
            const double r = std::exp(z[c] - log_denom) - (c == p.y[i] ? 1.0 : 0.0);
            if (r == 0.0) continue;
            double *g = &(*grad)[c * p.dim];
            for (std::size_t d = 0; d < p.dim; ++d) g[d] += r * xi[d];
            (*grad)[kd + c] += r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(p.n);
    loss *= inv_n;
    double wsq = 0.0;
    for (std::size_t j = 0; j < kd; ++j) wsq += theta[j] * theta[j];
    loss += 0.5 * p.l2 * wsq;
    if (grad) {
        for (std::size_t j = 0; j < theta.size(); ++j) {
            (*grad)[j] *= inv_n;
            if (j < kd) (*grad)[j] += p.l2 * theta[j];
        }
    }
    return loss;
}

double norm(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

LogisticModel train_classifier(std::span<const Embedding> embeddings,
                               std::span<const std::string> labels, const TrainParams &params,
                               TrainReport *report) {
    if (embeddings.empty() || embeddings.size() != labels.size()) {
        throw Error(ErrorCode::InvalidParameter, "need one label per embedding");
    }
    if (!(params.l2 >= 0.0) || !(params.initial_step > 0.0) || !(params.armijo > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "bad training parameters");
    }
    std::vector<std::string> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) {
        throw Error(ErrorCode::SingleClass, "training data has a single class");
    }

    Problem p;
    p.n = embeddings.size();
    p.dim = embeddings.front().dim();
    p.classes = classes.size();
    p.l2 = params.l2;
    if (p.dim == 0) throw Error(ErrorCode::DimensionMismatch, "empty embeddings");
    p.x.reserve(p.n * p.dim);
    for (std::size_t i = 0; i < p.n; ++i) {
        if (embeddings[i].dim() != p.dim) {
            throw Error(ErrorCode::DimensionMismatch, "embeddings differ in dimension");
        }
        p.x.insert(p.x.end(), embeddings[i].values().begin(), embeddings[i].values().end());
        p.y.push_back(static_cast<std::size_t>(
                std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin()));
    }

    std::vector<double> theta(p.classes * p.dim + p.classes, 0.0);
    std::vector<double> grad;
    std::vector<double> trial(theta.size());
    double loss = loss_and_gradient(p, theta, &grad);
    TrainReport rep;
    rep.loss_history.push_back(loss);
    double step = params.initial_step;
    double gnorm = norm(grad);

    for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
        if (gnorm < params.gradient_tolerance) {
            rep.converged = true;
            break;
        }
        bool accepted = false;
        double trial_loss = loss;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 0; j < theta.size(); ++j) trial[j] = theta[j] - step * grad[j];
            trial_loss = loss_and_gradient(p, trial, nullptr);
            if (trial_loss <= loss - params.armijo * step * gnorm * gnorm) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        rep.epochs = epoch + 1;
        if (!accepted) break;  // no descent left at machine precision
        theta.swap(trial);
        loss = loss_and_gradient(p, theta, &grad);
        gnorm = norm(grad);
        rep.loss_history.push_back(loss);
        step = std::min(step * 2.0, 1e6);
    }
    if (gnorm < params.gradient_tolerance) rep.converged = true;
    rep.final_gradient_norm = gnorm;
    if (report) *report = std::move(rep);

    const std::size_t kd = p.classes * p.dim;
    std::vector<float> w(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(kd));
    std::vector<float> b(theta.begin() + static_cast<std::ptrdiff_t>(kd), theta.end());
    return LogisticModel(std::move(classes), p.dim, std::move(w), std::move(b));
}

std::vector<double> logits(const LogisticModel &model, const Embedding &e) {
    if (e.dim() != model.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "embedding dim " + std::to_string(e.dim()) + " vs model dim " +
                            std::to_string(model.dim()));
    }
    std::vector<double> z(model.class_count());
    for (std::size_t c = 0; c < z.size(); ++c) {
        double s = model.biases()[c];
        for (std::size_t d = 0; d < model.dim(); ++d) {
            s += static_cast<double>(model.weight(c, d)) * e[d];
        }
        z[c] = s;
    }
    return z;
}

Prediction predict(const LogisticModel &model, const Embedding &e) {
    const std::vector<double> z = logits(model, e);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[best]) best = c;
    }
    Prediction out;
    out.class_index = best;
    out.label = model.class_labels()[best];
    out.probabilities.resize(z.size());
    double denom = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        out.probabilities[c] = std::exp(z[c] - z[best]);
        denom += out.probabilities[c];
    }
    for (double &v : out.probabilities) v /= denom;
    return out;
}

void save_model(const std::filesystem::path &path, const LogisticModel &model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    const nlohmann::json header = {{"format", "posekit-logistic"},
                                   {"version", 1},
                                   {"dim", model.dim()},
                                   {"labels", model.class_labels()}};
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char *>(model.weights().data()),
              static_cast<std::streamsize>(sizeof(float) * model.weights().size()));
    out.write(reinterpret_cast<const char *>(model.biases().data()),
              static_cast<std::streamsize>(sizeof(float) * model.biases().size()));
    if (!out) throw Error(ErrorCode::IoError, "model write failed");
}

LogisticModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty model file");
    std::vector<std::string> labels;
    std::size_t dim = 0;
    try {
        const auto header = nlohmann::json::parse(line);
        if (header.at("format") != "posekit-logistic" || header.at("version") != 1) {
            throw Error(ErrorCode::ParseError, "unsupported model format");
        }
        dim = header.at("dim").get<std::size_t>();
        labels = header.at("labels").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("bad model header: ") + e.what());
    }
    if (dim == 0 || labels.empty() || dim > (std::size_t{1} << 24) || labels.size() > (1u << 16)) {
        throw Error(ErrorCode::ParseError, "implausible model header");
    }
    std::vector<float> w(labels.size() * dim);
    std::vector<float> b(labels.size());
    in.read(reinterpret_cast<char *>(w.data()), static_cast<std::streamsize>(sizeof(float) * w.size()));
    in.read(reinterpret_cast<char *>(b.data()), static_cast<std::streamsize>(sizeof(float) * b.size()));
    if (!in || in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::ParseError, "model data block has the wrong size");
    }
    try {
        return LogisticModel(std::move(labels), dim, std::move(w), std::move(b));
    } catch (const Error &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace posekit::recognition
