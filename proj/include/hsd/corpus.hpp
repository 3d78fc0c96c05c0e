#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hsd {

enum class Task { A, B };

std::string task_name(Task task);
Task parse_task(const std::string& name);

// Fixed, ordered label sets; the position of a class name is its class id.
struct LabelScheme {
    Task task;
    std::vector<std::string> classes;

    static LabelScheme for_task(Task task);

    int num_classes() const { return static_cast<int>(classes.size()); }
    std::optional<int> class_id(const std::string& name) const;
    const std::string& class_name(int id) const { return classes.at(static_cast<std::size_t>(id)); }
};

struct LabeledExample {
    std::string id;
    std::string text;
    std::optional<int> label_a;
    std::optional<int> label_b;
};

struct Dataset {
    LabelScheme scheme;
    std::vector<LabeledExample> examples;
    std::string language;

    std::size_t size() const { return examples.size(); }
    // The label relevant to this dataset's task, if present.
    std::optional<int> label_of(const LabeledExample& ex) const {
        return scheme.task == Task::A ? ex.label_a : ex.label_b;
    }
};

// Rows for the label-free prediction input (header `tweet_id`, `text`).
struct UnlabeledExample {
    std::string id;
    std::string text;
};

// Loads a delimited UTF-8 file with a header row. Required columns:
// `tweet_id`, `text`, and the requested task's label column (`task1` for
// A, `task2` for B). The other task's column is parsed too when present
// so the NOT<->NONE coupling can be checked. Duplicate tweet_ids and
// empty texts are hard errors.
Dataset load_dataset(const std::string& path, char delimiter, Task task);

// Same file format without label columns; duplicates and empty texts are
// allowed here since every row must be scored.
std::vector<UnlabeledExample> load_unlabeled(const std::string& path, char delimiter);

// Per-class example counts, indexed by class id. Every class appears,
// possibly with count 0. Errors if an example lacks the task's label.
std::vector<std::int64_t> class_counts(const Dataset& dataset);

// Seeded stratified split: per class, shuffle the members and take the
// first round(train_fraction * n_c) for the train side.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double train_fraction,
                                             std::uint64_t seed);

// Plain seeded split over the whole dataset, same prefix-take rule.
std::pair<Dataset, Dataset> uniform_split(const Dataset& dataset, double train_fraction,
                                          std::uint64_t seed);

}  // namespace hsd
