#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcglab/contrastive.hpp"
#include "dcglab/dataset.hpp"

namespace dcglab {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// First/second moment estimates for one flat parameter block.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update, computed in double.
template <typename T>
void adam_step(AdamState& state, std::span<T> params, std::span<const T> grads, double lr,
               const AdamConfig& cfg = {});

/// Training defaults follow the original recipe: 50 epochs, batch 32,
/// learning rate 5e-5, Adam, early stopping on.
struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 5e-5;
    AdamConfig adam;
    bool early_stopping = true;
    std::size_t patience = 3;
    std::uint64_t seed = 42;
    std::size_t d_out = 512;
    bool freeze_logit_scale = false;

    /// Throws ArgumentError when a field is out of range.
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

[[nodiscard]] nlohmann::json to_json(const TrainConfig& cfg);
[[nodiscard]] TrainConfig train_config_from_json(const nlohmann::json& j);

/// Patience-based stopping on a loss that should decrease; min-delta is 0.
class EarlyStopping {
public:
    EarlyStopping(bool enabled, std::size_t patience) : enabled_(enabled), patience_(patience) {}

    /// Records one epoch's validation loss; returns true when it is a new best.
    bool observe(double val_loss);
    [[nodiscard]] bool should_stop() const noexcept { return enabled_ && bad_epochs_ >= patience_; }
    [[nodiscard]] double best_loss() const noexcept { return best_loss_; }
    /// 1-based epoch of the best loss; 0 before any observation.
    [[nodiscard]] std::size_t best_epoch() const noexcept { return best_epoch_; }

private:
    bool enabled_;
    std::size_t patience_;
    std::size_t epoch_ = 0;
    std::size_t best_epoch_ = 0;
    std::size_t bad_epochs_ = 0;
    double best_loss_ = 0.0;
};

struct Checkpoint {
    DualProjector projector;
    TrainConfig config;
    double best_val_loss = 0.0;
    std::size_t epoch_reached = 0;
    std::size_t best_epoch = 0;
    /// Extra metadata (e.g. the CLI's run echo); preserved through save/load.
    nlohmann::json extra = nlohmann::json::object();

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct TrainLog {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::string stop_reason;  // "max_epochs" or "early_stopping"
    std::size_t best_epoch = 0;
};

[[nodiscard]] nlohmann::json to_json(const TrainLog& log);

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    bool improved = false;
};

/// Mean clip loss over fixed, unshuffled validation batches.
[[nodiscard]] double validation_loss(const DualProjector& p, const PairSet& val_set, std::size_t batch_size);

struct TrainResult {
    Checkpoint checkpoint;
    TrainLog log;
};

/// Trains both heads and the logit scale with Adam. The returned checkpoint
/// holds the weights of the best validation epoch.
[[nodiscard]] TrainResult train(const PairSet& train_set, const PairSet& val_set, const TrainConfig& cfg,
                                const std::function<void(const EpochStats&)>& on_epoch = {});

inline constexpr std::string_view kCheckpointMagic = "CCKP";
inline constexpr std::uint32_t kCheckpointVersion = 1;

[[nodiscard]] std::vector<char> encode_checkpoint(const Checkpoint& c);
[[nodiscard]] Checkpoint decode_checkpoint(std::span<const char> bytes, const std::string& what = "checkpoint");
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dcglab
