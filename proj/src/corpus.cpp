#include "hsd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hsd/errors.hpp"
#include "hsd/rng.hpp"

namespace hsd {

std::string task_name(Task task) { return task == Task::A ? "A" : "B"; }

Task parse_task(const std::string& name) {
    if (name == "A" || name == "a") return Task::A;
    if (name == "B" || name == "b") return Task::B;
    throw ConfigError("unknown task \"" + name + "\" (expected A or B)");
}

LabelScheme LabelScheme::for_task(Task task) {
    if (task == Task::A) return LabelScheme{Task::A, {"HOF", "NOT"}};
    return LabelScheme{Task::B, {"HATE", "OFFN", "PRFN", "NONE"}};
}

std::optional<int> LabelScheme::class_id(const std::string& name) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] == name) return static_cast<int>(i);
    }
    return std::nullopt;
}

namespace {

bool valid_utf8(const std::string& s) {
    std::size_t i = 0;
    const auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xc0) == 0x80;
    };
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            ++i;
        } else if ((c & 0xe0) == 0xc0) {
            if (c < 0xc2 || !cont(1)) return false;
            i += 2;
        } else if ((c & 0xf0) == 0xe0) {
            if (!cont(1) || !cont(2)) return false;
            const unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
            if (c == 0xe0 && c1 < 0xa0) return false;  // overlong
            if (c == 0xed && c1 > 0x9f) return false;  // surrogate
            i += 3;
        } else if ((c & 0xf8) == 0xf0) {
            if (c > 0xf4 || !cont(1) || !cont(2) || !cont(3)) return false;
            const unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
            if (c == 0xf0 && c1 < 0x90) return false;  // overlong
            if (c == 0xf4 && c1 > 0x8f) return false;  // > U+10FFFF
            i += 4;
        } else {
            return false;
        }
    }
    return true;
}

struct Row {
    std::vector<std::string> fields;
    std::size_t line;  // 1-based line of the row's first character
};

// RFC-4180-style reader: fields may be double-quoted, quoted fields may
// contain the delimiter, newlines, and "" escapes. Accepts \n and \r\n.
std::vector<Row> read_delimited(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string data = buf.str();

    // Drop a UTF-8 BOM if present.
    if (data.size() >= 3 && data.compare(0, 3, "\xef\xbb\xbf") == 0) data.erase(0, 3);

    std::vector<Row> rows;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool row_open = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    const auto end_field = [&] { fields.push_back(std::move(field)); field.clear(); };
    const auto end_row = [&] {
        end_field();
        rows.push_back(Row{std::move(fields), row_line});
        fields.clear();
        row_open = false;
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (!row_open) {
            row_open = true;
            row_line = line;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_row();
            ++line;
        } else {
            field += c;
        }
    }
    if (in_quotes) throw DataError(path + ": unterminated quoted field");
    if (row_open || !field.empty() || !fields.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_row();
    }
    return rows;
}

std::string trimmed(const std::string& s) {
    const auto* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::string field_at(const Row& row, int col) {
    return col >= 0 && col < static_cast<int>(row.fields.size())
               ? row.fields[static_cast<std::size_t>(col)]
               : std::string();
}

void check_utf8_row(const std::string& path, const Row& row, std::size_t row_number) {
    for (const auto& f : row.fields) {
        if (!valid_utf8(f)) {
            throw DataError(path + ": row " + std::to_string(row_number) + ": invalid UTF-8");
        }
    }
}

}  // namespace

Dataset load_dataset(const std::string& path, char delimiter, Task task) {
    const auto rows = read_delimited(path, delimiter);
    if (rows.empty()) throw DataError(path + ": empty file, expected a header row");

    const auto& header = rows.front().fields;
    const int col_id = find_column(header, "tweet_id");
    const int col_text = find_column(header, "text");
    const int col_task1 = find_column(header, "task1");
    const int col_task2 = find_column(header, "task2");
    const int col_label = task == Task::A ? col_task1 : col_task2;
    const std::string label_name = task == Task::A ? "task1" : "task2";

    if (col_id < 0) throw DataError(path + ": missing required column \"tweet_id\"");
    if (col_text < 0) throw DataError(path + ": missing required column \"text\"");
    if (col_label < 0) throw DataError(path + ": missing required column \"" + label_name + "\"");

    const LabelScheme scheme_a = LabelScheme::for_task(Task::A);
    const LabelScheme scheme_b = LabelScheme::for_task(Task::B);
    const int not_id = *scheme_a.class_id("NOT");
    const int none_id = *scheme_b.class_id("NONE");

    Dataset dataset;
    dataset.scheme = LabelScheme::for_task(task);
    dataset.examples.reserve(rows.size() - 1);
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(rows.size());

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const Row& row = rows[r];
        const std::size_t row_number = r + 1;
        check_utf8_row(path, row, row_number);

        LabeledExample ex;
        ex.id = field_at(row, col_id);
        ex.text = field_at(row, col_text);
        if (ex.id.empty()) {
            throw DataError(path + ": row " + std::to_string(row_number) + ": empty tweet_id");
        }
        if (trimmed(ex.text).empty()) {
            throw DataError(path + ": row " + std::to_string(row_number) + ": empty text");
        }
        if (!seen_ids.insert(ex.id).second) {
            throw DataError(path + ": row " + std::to_string(row_number) + ": duplicate tweet_id \"" +
                            ex.id + "\"");
        }

        const auto parse_label = [&](int col, const LabelScheme& scheme) -> std::optional<int> {
            if (col < 0) return std::nullopt;
            const std::string raw = field_at(row, col);
            if (raw.empty()) return std::nullopt;
            const auto id = scheme.class_id(raw);
            if (!id) {
                throw DataError(path + ": row " + std::to_string(row_number) + ": unknown " +
                                (scheme.task == Task::A ? "task1" : "task2") + " label \"" + raw +
                                "\"");
            }
            return id;
        };
        ex.label_a = parse_label(col_task1, scheme_a);
        ex.label_b = parse_label(col_task2, scheme_b);

        if (ex.label_a && ex.label_b) {
            const bool is_not = *ex.label_a == not_id;
            const bool is_none = *ex.label_b == none_id;
            if (is_not != is_none) {
                throw DataError(path + ": row " + std::to_string(row_number) +
                                ": inconsistent labels (task1 " +
                                scheme_a.class_name(*ex.label_a) + " with task2 " +
                                scheme_b.class_name(*ex.label_b) + ")");
            }
        }
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

std::vector<UnlabeledExample> load_unlabeled(const std::string& path, char delimiter) {
    const auto rows = read_delimited(path, delimiter);
    if (rows.empty()) throw DataError(path + ": empty file, expected a header row");

    const auto& header = rows.front().fields;
    const int col_id = find_column(header, "tweet_id");
    const int col_text = find_column(header, "text");
    if (col_id < 0) throw DataError(path + ": missing required column \"tweet_id\"");
    if (col_text < 0) throw DataError(path + ": missing required column \"text\"");

    std::vector<UnlabeledExample> out;
    out.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t row_number = r + 1;
        check_utf8_row(path, rows[r], row_number);
        UnlabeledExample ex{field_at(rows[r], col_id), field_at(rows[r], col_text)};
        if (ex.id.empty()) {
            throw DataError(path + ": row " + std::to_string(row_number) + ": empty tweet_id");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<std::int64_t> class_counts(const Dataset& dataset) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(dataset.scheme.num_classes()), 0);
    for (const auto& ex : dataset.examples) {
        const auto label = dataset.label_of(ex);
        if (!label) {
            throw DataError("example \"" + ex.id + "\" has no task " +
                            task_name(dataset.scheme.task) + " label");
        }
        ++counts[static_cast<std::size_t>(*label)];
    }
    return counts;
}

namespace {

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.scheme = dataset.scheme;
    out.language = dataset.language;
    out.examples.reserve(indices.size());
    for (const auto i : indices) out.examples.push_back(dataset.examples[i]);
    return out;
}

void check_fraction(double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0, 1), got " +
                          std::to_string(train_fraction));
    }
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double train_fraction,
                                             std::uint64_t seed) {
    check_fraction(train_fraction);

    std::unordered_map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto label = dataset.label_of(dataset.examples[i]);
        if (!label) {
            throw DataError("example \"" + dataset.examples[i].id + "\" has no task " +
                            task_name(dataset.scheme.task) + " label");
        }
        by_class[*label].push_back(i);
    }

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> valid_idx;
    for (int c = 0; c < dataset.scheme.num_classes(); ++c) {
        auto it = by_class.find(c);
        if (it == by_class.end()) continue;
        auto& members = it->second;
        Rng rng(derive_seed(seed, 0x73706c6974ULL, static_cast<std::uint64_t>(c)));  // "split"
        shuffle(members, rng);
        const auto take = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < take ? train_idx : valid_idx).push_back(members[i]);
        }
    }
    // Keep file order inside each part so the split is a stable partition.
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(valid_idx.begin(), valid_idx.end());
    return {subset(dataset, train_idx), subset(dataset, valid_idx)};
}

std::pair<Dataset, Dataset> uniform_split(const Dataset& dataset, double train_fraction,
                                          std::uint64_t seed) {
    check_fraction(train_fraction);

    std::vector<std::size_t> indices(dataset.examples.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    Rng rng(derive_seed(seed, 0x73706c6974ULL));
    shuffle(indices, rng);

    const auto take = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(indices.size())));
    std::vector<std::size_t> train_idx(indices.begin(), indices.begin() + std::min(take, indices.size()));
    std::vector<std::size_t> valid_idx(indices.begin() + std::min(take, indices.size()), indices.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(valid_idx.begin(), valid_idx.end());
    return {subset(dataset, train_idx), subset(dataset, valid_idx)};
}

}  // namespace hsd
