#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsd/corpus.hpp"

namespace hsd {

// Word-level tokenizer: splits on Unicode whitespace, then peels leading
// and trailing punctuation into their own tokens. `#` and `@` stay glued
// to a following word character so hashtags and mentions survive.
std::vector<std::string> tokenize(const std::string& text, bool lowercase);

class Vocabulary {
public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;

    Vocabulary();
    explicit Vocabulary(std::vector<std::string> tokens);

    int size() const { return static_cast<int>(tokens_.size()); }
    int id_of(const std::string& token) const;
    const std::string& token_of(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Vocabulary over the training corpus only: tokens with frequency >=
// min_freq, ordered by (frequency desc, token asc) after <pad>/<unk>.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_freq);

// Nearest-rank percentile: sort ascending, take the 1-based element at
// ceil(percentile/100 * n).
int select_max_len(std::vector<int> lengths, double percentile);

struct EncodedBatch {
    Eigen::MatrixXi ids;      // [B x L]
    Eigen::MatrixXi mask;     // [B x L], 1 = real token
    Eigen::VectorXi labels;   // [B], -1 when unlabeled
    Eigen::VectorXi lengths;  // [B]

    int batch_size() const { return static_cast<int>(ids.rows()); }
    int max_len() const { return static_cast<int>(ids.cols()); }

    EncodedBatch rows(int begin, int count) const;
};

// Tokenize, truncate the token list to max_len, then map out-of-vocab
// tokens to UNK and pad to max_len. An example with no tokens encodes as
// a single UNK so every row has length >= 1. Labels come from the task's
// label field; examples without one get -1.
EncodedBatch encode_batch(const std::vector<LabeledExample>& examples, Task task,
                          const Vocabulary& vocab, int max_len, bool lowercase);

}  // namespace hsd
