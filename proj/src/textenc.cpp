#include "hsd/textenc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hsd/errors.hpp"

namespace hsd {

namespace {

// Decodes one UTF-8 codepoint starting at i; invalid bytes come back as
// single-byte codepoints so tokenization never fails on dirty input.
char32_t decode_utf8(const std::string& s, std::size_t& i) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    const auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xc0) == 0x80;
    };
    if (c < 0x80) {
        ++i;
        return c;
    }
    if ((c & 0xe0) == 0xc0 && cont(1)) {
        const char32_t cp = ((c & 0x1fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3fu);
        i += 2;
        return cp;
    }
    if ((c & 0xf0) == 0xe0 && cont(1) && cont(2)) {
        const char32_t cp = ((c & 0x0fu) << 12) |
                            ((static_cast<unsigned char>(s[i + 1]) & 0x3fu) << 6) |
                            (static_cast<unsigned char>(s[i + 2]) & 0x3fu);
        i += 3;
        return cp;
    }
    if ((c & 0xf8) == 0xf0 && cont(1) && cont(2) && cont(3)) {
        const char32_t cp = ((c & 0x07u) << 18) |
                            ((static_cast<unsigned char>(s[i + 1]) & 0x3fu) << 12) |
                            ((static_cast<unsigned char>(s[i + 2]) & 0x3fu) << 6) |
                            (static_cast<unsigned char>(s[i + 3]) & 0x3fu);
        i += 4;
        return cp;
    }
    ++i;
    return c;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xc0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xe0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
        out += static_cast<char>(0xf0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
        out += static_cast<char>(0x80 | (cp & 0x3f));
    }
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
        case 0x0085: case 0x00a0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202f: case 0x205f: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200a;
    }
}

bool is_punct(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
               (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
    }
    switch (cp) {
        case 0x00a1: case 0x00ab: case 0x00bb: case 0x00bf:
        case 0x2013: case 0x2014: case 0x2026:
            return true;
        default:
            return cp >= 0x2018 && cp <= 0x201f;
    }
}

bool is_word_char(char32_t cp) { return !is_whitespace(cp) && !is_punct(cp); }

std::string encode_range(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) encode_utf8(cps[i], out);
    return out;
}

void emit_chunk(const std::vector<char32_t>& chunk, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = chunk.size();

    // Leading punctuation, one token per character; '#'/'@' followed by a
    // word character stays with the word.
    while (begin < end && is_punct(chunk[begin])) {
        const bool keeps_word = (chunk[begin] == U'#' || chunk[begin] == U'@') &&
                                begin + 1 < end && is_word_char(chunk[begin + 1]);
        if (keeps_word) break;
        out.push_back(encode_range(chunk, begin, begin + 1));
        ++begin;
    }

    // Trailing punctuation peels off but is emitted in text order.
    std::size_t core_end = end;
    while (core_end > begin && is_punct(chunk[core_end - 1])) --core_end;
    if (core_end == begin) {
        // Pure punctuation after the leading pass can only happen for a
        // '#'/'@' run; emit char by char.
        for (std::size_t i = begin; i < end; ++i) out.push_back(encode_range(chunk, i, i + 1));
        return;
    }
    out.push_back(encode_range(chunk, begin, core_end));
    for (std::size_t i = core_end; i < end; ++i) out.push_back(encode_range(chunk, i, i + 1));
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, bool lowercase) {
    std::vector<std::string> out;
    std::vector<char32_t> chunk;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = decode_utf8(text, i);
        if (lowercase && cp >= U'A' && cp <= U'Z') cp += 0x20;
        if (is_whitespace(cp)) {
            if (!chunk.empty()) {
                emit_chunk(chunk, out);
                chunk.clear();
            }
        } else {
            chunk.push_back(cp);
        }
    }
    if (!chunk.empty()) emit_chunk(chunk, out);
    return out;
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{"<pad>", "<unk>"}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2 || tokens_[0] != "<pad>" || tokens_[1] != "<unk>") {
        throw DataError("vocabulary must start with <pad>, <unk>");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
            throw DataError("duplicate vocabulary token \"" + tokens_[i] + "\"");
        }
    }
}

int Vocabulary::id_of(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_freq) {
    std::map<std::string, std::int64_t> freq;
    for (const auto& tokens : corpus) {
        for (const auto& t : tokens) ++freq[t];
    }

    std::vector<std::pair<std::string, std::int64_t>> kept;
    kept.reserve(freq.size());
    for (auto& [token, count] : freq) {
        if (count >= min_freq) kept.emplace_back(token, count);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::string> tokens{"<pad>", "<unk>"};
    tokens.reserve(kept.size() + 2);
    for (auto& [token, count] : kept) tokens.push_back(token);
    return Vocabulary(std::move(tokens));
}

int select_max_len(std::vector<int> lengths, double percentile) {
    if (lengths.empty()) throw ConfigError("select_max_len: empty length list");
    if (!(percentile > 0.0 && percentile <= 100.0)) {
        throw ConfigError("percentile must be in (0, 100], got " + std::to_string(percentile));
    }
    std::sort(lengths.begin(), lengths.end());
    const double rank = percentile * static_cast<double>(lengths.size()) / 100.0;
    auto index = static_cast<std::size_t>(std::ceil(rank - 1e-9));
    index = std::clamp<std::size_t>(index, 1, lengths.size());
    return lengths[index - 1];
}

EncodedBatch EncodedBatch::rows(int begin, int count) const {
    EncodedBatch out;
    out.ids = ids.middleRows(begin, count);
    out.mask = mask.middleRows(begin, count);
    out.labels = labels.segment(begin, count);
    out.lengths = lengths.segment(begin, count);
    return out;
}

EncodedBatch encode_batch(const std::vector<LabeledExample>& examples, Task task,
                          const Vocabulary& vocab, int max_len, bool lowercase) {
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    const auto B = static_cast<Eigen::Index>(examples.size());

    EncodedBatch batch;
    batch.ids = Eigen::MatrixXi::Zero(B, max_len);
    batch.mask = Eigen::MatrixXi::Zero(B, max_len);
    batch.labels = Eigen::VectorXi::Constant(B, -1);
    batch.lengths = Eigen::VectorXi::Zero(B);

    for (Eigen::Index b = 0; b < B; ++b) {
        const auto& ex = examples[static_cast<std::size_t>(b)];
        auto tokens = tokenize(ex.text, lowercase);
        if (tokens.size() > static_cast<std::size_t>(max_len)) {
            tokens.resize(static_cast<std::size_t>(max_len));
        }
        if (tokens.empty()) {
            batch.ids(b, 0) = Vocabulary::kUnkId;
            batch.mask(b, 0) = 1;
            batch.lengths(b) = 1;
        } else {
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                batch.ids(b, static_cast<Eigen::Index>(t)) = vocab.id_of(tokens[t]);
                batch.mask(b, static_cast<Eigen::Index>(t)) = 1;
            }
            batch.lengths(b) = static_cast<int>(tokens.size());
        }
        const auto label = task == Task::A ? ex.label_a : ex.label_b;
        if (label) batch.labels(b) = *label;
    }
    return batch;
}

}  // namespace hsd
