#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/loss.hpp"
#include "hsd/metrics.hpp"
#include "hsd/model.hpp"
#include "hsd/optim.hpp"
#include "hsd/textenc.hpp"

namespace hsd {

enum class SplitMode { Stratified, Uniform };

std::string split_mode_name(SplitMode mode);
SplitMode parse_split_mode(const std::string& name);

struct TrainConfig {
    Task task = Task::A;
    std::uint64_t seed = 42;
    double train_fraction = 0.9;
    int batch_size = 8;
    int epochs = 4;
    OptimHyper optimizer;
    WeightScheme weight_scheme = WeightScheme::InverseFrequencyNormalized;
    SplitMode split_mode = SplitMode::Stratified;
    bool lowercase = true;
    int min_token_freq = 2;
    double max_len_percentile = 99.0;
    std::optional<int> max_len;  // explicit override of the percentile rule
    int embed_dim = 32;
    EncoderKind encoder = EncoderKind::Bag;
    int num_heads = 2;
    int ffn_dim = 64;

    void validate() const;
};

struct EpochRecord {
    double train_loss = 0.0;
    Metrics validation;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;  // 1-based, earliest epoch attaining the best score
    double best_macro_f1 = 0.0;
};

// Everything needed to run the trained model later; serialized by the
// checkpoint module.
struct Checkpoint {
    int format_version = 1;
    TrainConfig config;
    LabelScheme scheme;
    Vocabulary vocab;
    ClassWeights class_weights;
    int max_len = 1;
    ModelParams params;
    int best_epoch = 0;
    double best_macro_f1 = 0.0;
};

using LogSink = std::function<void(const std::string&)>;

// The full protocol: seeded split, vocabulary / class weights / max_len
// from the training side only, AdamW minibatch epochs with a fresh
// shuffle per epoch, validation macro F1 after each epoch, and the
// parameter snapshot from the best epoch in the returned checkpoint.
std::pair<Checkpoint, TrainReport> train(const Dataset& dataset, const TrainConfig& config,
                                         const LogSink& log = nullptr);

// Forward-only scoring of a labeled dataset; results are independent of
// batch_size.
Metrics evaluate(const Checkpoint& checkpoint, const Dataset& dataset, int batch_size = 8);

// Class-id predictions for raw texts, in input order.
std::vector<int> predict_texts(const Checkpoint& checkpoint, const std::vector<std::string>& texts,
                               int batch_size = 8);

}  // namespace hsd
