#include "irisct/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <regex>
#include <set>
#include <unordered_set>

namespace irisct {
namespace {

struct LayoutRegex {
    std::regex re;
    int subject_group = -1;
    int session_group = -1;
    int sample_group = -1;
};

LayoutRegex compile_layout(const std::string& layout) {
    LayoutRegex out;
    std::string pat;
    int group = 0;
    size_t i = 0;
    // First occurrence of a placeholder captures; repeats become
    // backreferences so {subject}/{subject}_x.bmp means the same name twice.
    auto placeholder = [&](const std::string& name, const char* cls, int& slot) {
        std::string token = "{" + name + "}";
        if (layout.compare(i, token.size(), token) != 0) return false;
        i += token.size();
        if (slot < 0) {
            ++group;
            slot = group;
            pat += "(";
            pat += cls;
            pat += ")";
        } else {
            pat += "\\" + std::to_string(slot);
        }
        return true;
    };
    while (i < layout.size()) {
        char c = layout[i];
        if (c == '{') {
            if (!placeholder("subject", "[^/]+", out.subject_group) &&
                !placeholder("session", "[0-9]+", out.session_group) &&
                !placeholder("sample", "[^/]+", out.sample_group))
                fail(ErrorCode::BadConfig, "unknown placeholder in layout: " + layout);
        } else if (c == '*') {
            pat += "[^/]*";
            ++i;
        } else {
            static const std::string special = ".^$|()[]+?\\";
            if (special.find(c) != std::string::npos) pat += '\\';
            pat += c;
            ++i;
        }
    }
    if (out.subject_group < 0)
        fail(ErrorCode::BadConfig, "layout has no {subject} placeholder: " + layout);
    if (out.sample_group < 0)
        fail(ErrorCode::BadConfig, "layout has no {sample} placeholder: " + layout);
    out.re = std::regex(pat);
    return out;
}

int parse_session(const std::string& text) {
    int v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || v < 1)
        fail(ErrorCode::BadConfig, "session field '" + text + "' is not a positive integer");
    return v;
}

} // namespace

int DatasetIndex::n_subjects() const {
    std::set<std::string> subjects;
    for (const auto& e : entries) subjects.insert(e.subject_id);
    return static_cast<int>(subjects.size());
}

DatasetIndex scan_dataset(const std::filesystem::path& root, const std::string& layout) {
    namespace fs = std::filesystem;
    if (!fs::exists(root)) fail(ErrorCode::FileNotFound, "dataset root " + root.string());
    LayoutRegex lr = compile_layout(layout);

    DatasetIndex index;
    std::unordered_set<std::string> seen;
    for (const auto& de : fs::recursive_directory_iterator(root)) {
        if (!de.is_regular_file()) continue;
        std::string rel = fs::relative(de.path(), root).generic_string();
        std::smatch m;
        if (!std::regex_match(rel, m, lr.re)) continue;
        DatasetEntry e;
        e.subject_id = m[lr.subject_group].str();
        e.session = lr.session_group > 0 ? parse_session(m[lr.session_group].str()) : 1;
        std::string raw_sample = m[lr.sample_group].str();
        e.sample_id = lr.session_group > 0
                          ? std::to_string(e.session) + "_" + raw_sample
                          : raw_sample;
        e.path = de.path();
        std::string key = e.subject_id + "\x1f" + e.sample_id;
        if (!seen.insert(key).second)
            fail(ErrorCode::BadRecord,
                 "duplicate (subject, sample) pair " + e.subject_id + "/" + e.sample_id);
        index.entries.push_back(std::move(e));
    }
    if (index.entries.empty())
        fail(ErrorCode::EmptyDataset,
             "no files under " + root.string() + " match layout " + layout);
    std::sort(index.entries.begin(), index.entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) {
                  return std::tie(a.subject_id, a.session, a.sample_id) <
                         std::tie(b.subject_id, b.session, b.sample_id);
              });
    return index;
}

} // namespace irisct
