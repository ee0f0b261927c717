#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "irisct/error.hpp"

namespace irisct {

struct DatasetEntry {
    std::string subject_id;
    std::string sample_id;  // session-qualified, unique per subject
    int session = 1;
    std::filesystem::path path;
};

struct DatasetIndex {
    std::vector<DatasetEntry> entries;

    int n_subjects() const;
    int n_samples() const { return static_cast<int>(entries.size()); }
};

/// Default layout matching the CASIA v1 directory convention.
inline constexpr const char* kDefaultLayout =
    "{subject}/{session}/{subject}_{session}_{sample}.bmp";

/// Indexes files under root that match the layout pattern. The pattern is a
/// relative path with {subject}, {session} and {sample} placeholders plus
/// ordinary glob stars. A missing {session} placeholder puts everything in
/// session 1. Entries come back sorted by (subject, session, sample).
/// Throws Error{EmptyDataset} when nothing matches.
DatasetIndex scan_dataset(const std::filesystem::path& root, const std::string& layout);

} // namespace irisct
