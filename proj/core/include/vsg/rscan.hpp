#pragma once

// Adapter for the graph-level export of the 3RScan / 3DSSG datasets.
//
// Expected layout under `root`:
//   3RScan.json           [{ "reference": <scan>, "scans": [{ "reference": <rescan>,
//                             "transform": [16 numbers, column-major] }] }]
//   objects.json          { "scans": [{ "scan": <scan>, "objects": [{ "id", "label",
//                             "attributes": { <category>: [values] }, "affordances": [..] }] }] }
//   relationships.json    { "scans": [{ "scan": <scan>,
//                             "relationships": [[source, target, relation_id, name]] }] }
//   <scan>/semseg.v2.json { "segGroups": [{ "objectId", "obb": { "centroid": [x, y, z] } }] }
//
// Rescan centroids are mapped into the reference scan frame with the
// rescan transform when one is given.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "vsg/dataset.hpp"

namespace vsg {

struct IngestReport {
  std::size_t environments = 0;
  std::size_t scans = 0;
  std::size_t samples = 0;
  std::size_t skipped_environments = 0;
  std::size_t skipped_objects = 0;
  LabelStats label_stats;
};

struct IngestResult {
  std::optional<Taxonomy> taxonomy;  // empty when nothing was ingested
  std::vector<Environment> environments;
  std::vector<Sample> samples;
  IngestReport report;
};

// Builds a taxonomy from the export when `taxonomy` is not given: classes
// from object labels, attributes from the attribute categories (the "state"
// category is state-kind) and affordances, relationships from edge names.
IngestResult ingest_3rscan_layout(const std::filesystem::path& root,
                                  const std::optional<Taxonomy>& taxonomy,
                                  const LabelConfig& labels, const SplitFractions& fractions,
                                  std::uint64_t split_seed);

}  // namespace vsg
