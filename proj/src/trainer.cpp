#include <cmath>
#include <limits>

#include "dcglab/trainer.hpp"

namespace dcglab {

using nlohmann::json;

void TrainConfig::validate() const {
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (batch_size < 2) throw ArgumentError("batch size must be >= 2, got " + std::to_string(batch_size));
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ArgumentError("learning rate must be positive and finite");
    }
    if (early_stopping && patience < 1) throw ArgumentError("patience must be >= 1 when early stopping is on");
    if (d_out < 1) throw ArgumentError("d_out must be >= 1");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
        !(adam.epsilon > 0.0)) {
        throw ArgumentError("Adam betas must lie in [0, 1) and epsilon must be positive");
    }
}

json to_json(const TrainConfig& cfg) {
    return json{{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"learning_rate", cfg.learning_rate},
                {"optimizer", {{"name", "adam"}, {"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2},
                               {"epsilon", cfg.adam.epsilon}}},
                {"early_stopping", cfg.early_stopping},
                {"patience", cfg.patience},
                {"seed", cfg.seed},
                {"d_out", cfg.d_out},
                {"freeze_logit_scale", cfg.freeze_logit_scale}};
}

TrainConfig train_config_from_json(const json& j) {
    try {
        TrainConfig cfg;
        cfg.epochs = j.at("epochs").get<std::size_t>();
        cfg.batch_size = j.at("batch_size").get<std::size_t>();
        cfg.learning_rate = j.at("learning_rate").get<double>();
        const json& opt = j.at("optimizer");
        cfg.adam.beta1 = opt.at("beta1").get<double>();
        cfg.adam.beta2 = opt.at("beta2").get<double>();
        cfg.adam.epsilon = opt.at("epsilon").get<double>();
        cfg.early_stopping = j.at("early_stopping").get<bool>();
        cfg.patience = j.at("patience").get<std::size_t>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.d_out = j.at("d_out").get<std::size_t>();
        cfg.freeze_logit_scale = j.at("freeze_logit_scale").get<bool>();
        return cfg;
    } catch (const json::exception& e) {
        throw FormatError(std::string("train config metadata: ") + e.what());
    }
}

json to_json(const TrainLog& log) {
    return json{{"train_loss", log.train_loss},
                {"val_loss", log.val_loss},
                {"epochs_run", log.train_loss.size()},
                {"best_epoch", log.best_epoch},
                {"stop_reason", log.stop_reason}};
}

bool EarlyStopping::observe(double val_loss) {
    ++epoch_;
    if (best_epoch_ == 0 || val_loss < best_loss_) {
        best_loss_ = val_loss;
        best_epoch_ = epoch_;
        bad_epochs_ = 0;
        return true;
    }
    ++bad_epochs_;
    return false;
}

double validation_loss(const DualProjector& p, const PairSet& val_set, std::size_t batch_size) {
    const auto groups = sequential_batch_positions(val_set.size(), batch_size);
    if (groups.empty()) {
        throw SizeError("validation set needs at least 2 pairs, got " + std::to_string(val_set.size()));
    }
    double total = 0.0;
    for (const auto& positions : groups) {
        total += clip_loss(p, val_set.gather_images(positions), val_set.gather_texts(positions)).loss;
    }
    return total / static_cast<double>(groups.size());
}

TrainResult train(const PairSet& train_set, const PairSet& val_set, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch) {
    cfg.validate();
    if (train_set.size() < 2) {
        throw SizeError("training set needs at least 2 pairs, got " + std::to_string(train_set.size()));
    }
    if (val_set.size() < 2) {
        throw SizeError("validation set needs at least 2 pairs, got " + std::to_string(val_set.size()));
    }
    if (train_set.dim() != val_set.dim()) {
        throw ShapeError("training dim " + std::to_string(train_set.dim()) + " != validation dim " +
                         std::to_string(val_set.dim()));
    }

    DualProjector p = init_projector(train_set.dim(), cfg.d_out, cfg.seed);
    AdamState image_state(p.image_head.weight.size());
    AdamState text_state(p.text_head.weight.size());
    AdamState scale_state(1);

    TrainResult result;
    Checkpoint& best = result.checkpoint;
    best.config = cfg;
    best.projector = p;
    EarlyStopping stopper(cfg.early_stopping, cfg.patience);
    result.log.stop_reason = "max_epochs";

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        const auto groups = batch_positions(train_set.size(), cfg.batch_size, cfg.seed, epoch);
        for (const auto& positions : groups) {
            const auto grads =
                clip_loss_grad(p, train_set.gather_images(positions), train_set.gather_texts(positions));
            epoch_loss += grads.loss;
            adam_step<float>(image_state, p.image_head.weight.data(), grads.grad_image_weight.data(),
                             cfg.learning_rate, cfg.adam);
            adam_step<float>(text_state, p.text_head.weight.data(), grads.grad_text_weight.data(),
                             cfg.learning_rate, cfg.adam);
            if (!cfg.freeze_logit_scale) {
                const float g = static_cast<float>(grads.grad_log_logit_scale);
                adam_step<float>(scale_state, std::span<float>(&p.log_logit_scale, 1), std::span<const float>(&g, 1),
                                 cfg.learning_rate, cfg.adam);
            }
        }
        const double train_loss = epoch_loss / static_cast<double>(groups.size());
        const double val_loss = validation_loss(p, val_set, cfg.batch_size);
        result.log.train_loss.push_back(train_loss);
        result.log.val_loss.push_back(val_loss);

        const bool improved = stopper.observe(val_loss);
        if (improved) best.projector = p;
        if (on_epoch) on_epoch({epoch, train_loss, val_loss, improved});
        if (stopper.should_stop()) {
            result.log.stop_reason = "early_stopping";
            break;
        }
    }

    best.best_val_loss = stopper.best_loss();
    best.best_epoch = stopper.best_epoch();
    best.epoch_reached = result.log.train_loss.size();
    result.log.best_epoch = stopper.best_epoch();
    return result;
}

}  // namespace dcglab
