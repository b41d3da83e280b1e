#include <array>
#include <fstream>
#include <random>
#include <unordered_map>

#include "nlds/csv.hpp"
#include "nlds/errors.hpp"
#include "nlds/graph.hpp"

namespace nlds {

const std::vector<EntityFile>& dataset_layout() {
  static const std::vector<EntityFile> layout = {
      {"patients.csv", "Patients", "", {"ID", "BIRTHPLACE", "RACE", "GENDER", "BIRTHDATE"}},
      {"encounters.csv", "Encounters", "PATIENT_HAS_ENCOUNTER",
       {"ID", "PATIENT", "DESCRIPTION", "REASON"}},
      {"medications.csv", "Medications", "PATIENT_HAS_MEDICATION",
       {"ID", "PATIENT", "ENCOUNTER", "DESCRIPTION", "REASON"}},
      {"allergies.csv", "Allergies", "PATIENT_HAS_ALLERGY", {"ID", "PATIENT", "DESCRIPTION"}},
      {"conditions.csv", "Conditions", "PATIENT_HAS_CONDITION", {"ID", "PATIENT", "DESCRIPTION"}},
      {"careplans.csv", "CarePlans", "PATIENT_HAS_CAREPLAN", {"ID", "PATIENT", "DESCRIPTION"}},
      {"procedures.csv", "Procedures", "PATIENT_HAS_PROCEDURE", {"ID", "PATIENT", "DESCRIPTION"}},
      {"immunizations.csv", "Immunizations", "PATIENT_HAS_IMMUNIZATION",
       {"ID", "PATIENT", "DESCRIPTION"}},
  };
  return layout;
}

namespace {

constexpr const char* kEncounterForMedication = "ENCOUNTER_FOR_MEDICATION";

bool is_foreign_key(const std::string& column) {
  return column == "PATIENT" || column == "ENCOUNTER";
}

using IdIndex = std::unordered_map<std::string, NodeId>;

}  // namespace

PropertyGraph load_csv_dataset(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) {
    throw IngestError("dataset directory not found: " + directory.string());
  }
  PropertyGraph graph;
  std::optional<IdIndex> patients;
  std::optional<IdIndex> encounters;

  struct Pending {
    const EntityFile* entity;
    csv::Table table;
    std::vector<NodeId> ids;
  };
  std::vector<Pending> loaded;

  // Nodes first, in layout order, so ids are grouped by label.
  for (const auto& entity : dataset_layout()) {
    const auto path = directory / entity.file;
    if (!std::filesystem::exists(path)) continue;
    Pending p{&entity, csv::read_file(path), {}};
    for (const auto& col : entity.columns) {
      if (p.table.column(col) < 0) {
        throw IngestError(entity.file + ": missing required column " + col);
      }
    }
    IdIndex index;
    const int id_col = p.table.column("ID");
    for (std::size_t r = 0; r < p.table.rows.size(); ++r) {
      auto& row = p.table.rows[r];
      if (row.size() != p.table.header.size()) {
        throw IngestError(entity.file + " row " + std::to_string(r + 1) + ": expected " +
                          std::to_string(p.table.header.size()) + " fields, got " +
                          std::to_string(row.size()));
      }
      PropertyMap props;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const auto& name = p.table.header[c];
        if (is_foreign_key(name) || row[c].empty()) continue;
        props.emplace(name, row[c]);
      }
      const NodeId id = graph.add_node(entity.label, std::move(props));
      p.ids.push_back(id);
      if (!index.emplace(row[static_cast<std::size_t>(id_col)], id).second) {
        throw IngestError(entity.file + " row " + std::to_string(r + 1) + ": duplicate ID " +
                          row[static_cast<std::size_t>(id_col)]);
      }
    }
    if (entity.label == "Patients") patients = std::move(index);
    if (entity.label == "Encounters") encounters = std::move(index);
    loaded.push_back(std::move(p));
  }

  auto resolve = [](const std::optional<IdIndex>& index, const std::string& key,
                    const Pending& p, std::size_t r, const char* column) -> std::optional<NodeId> {
    if (key.empty() || !index) return std::nullopt;
    auto it = index->find(key);
    if (it == index->end()) {
      throw IngestError(p.entity->file + " row " + std::to_string(r + 1) + ": " + column + " '" +
                        key + "' does not reference an existing row");
    }
    return it->second;
  };

  for (const auto& p : loaded) {
    const int patient_col = p.table.column("PATIENT");
    const int encounter_col = p.table.column("ENCOUNTER");
    for (std::size_t r = 0; r < p.table.rows.size(); ++r) {
      const auto& row = p.table.rows[r];
      if (patient_col >= 0) {
        if (auto src = resolve(patients, row[static_cast<std::size_t>(patient_col)], p, r,
                               "PATIENT")) {
          graph.add_relationship(p.entity->relationship, *src, p.ids[r]);
        }
      }
      if (encounter_col >= 0) {
        if (auto src = resolve(encounters, row[static_cast<std::size_t>(encounter_col)], p, r,
                               "ENCOUNTER")) {
          graph.add_relationship(kEncounterForMedication, *src, p.ids[r]);
        }
      }
    }
  }
  return graph;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& synthetic_medications() {
  static const std::vector<std::string> meds = {
      "Lisinopril 10 MG Oral Tablet",
      "Amlodipine 5 MG Oral Tablet",
      "Hydrochlorothiazide 25 MG Oral Tablet",
      "Metformin 500 MG Oral Tablet",
      "Simvastatin 20 MG Oral Tablet",
      "Acetaminophen 325 MG Oral Tablet",
      "Ibuprofen 200 MG Oral Tablet",
      "Amoxicillin 250 MG Oral Capsule",
      "Atorvastatin 40 MG Oral Tablet",
      "Omeprazole 20 MG Delayed Release Oral Capsule",
      "Albuterol 0.09 MG/ACTUAT Inhaler",
      "Insulin Glargine 100 UNT/ML Injectable Solution",
  };
  return meds;
}

namespace {

// Reason for each entry of synthetic_medications(), index-aligned.
const std::array<const char*, 12> kMedicationReasons = {
    "Hypertension", "Hypertension",         "Hypertension", "Diabetes",
    "Hyperlipidemia", "Acute bronchitis",   "Sprain of ankle", "Streptococcal sore throat",
    "Hyperlipidemia", "Gastroesophageal reflux disease", "Asthma", "Diabetes"};

const std::array<const char*, 10> kBirthplaces = {
    "Boston Massachusetts US",    "Worcester Massachusetts US", "Springfield Massachusetts US",
    "Cambridge Massachusetts US", "Lowell Massachusetts US",    "Brockton Massachusetts US",
    "Quincy Massachusetts US",    "Lynn Massachusetts US",      "Newton Massachusetts US",
    "Salem Massachusetts US"};

const std::array<const char*, 6> kEncounterTypes = {
    "Encounter for check up",   "Emergency room admission", "Consultation for treatment",
    "Outpatient procedure",     "Well child visit",         "Encounter for symptom"};

const std::array<const char*, 8> kConditions = {
    "Hypertension",   "Diabetes",        "Hyperlipidemia", "Asthma",
    "Acute bronchitis", "Sprain of ankle", "Obesity",      "Chronic sinusitis"};

const std::array<const char*, 5> kAllergies = {"Allergy to peanuts", "Allergy to mould",
                                               "Dander (animal) allergy", "House dust mite allergy",
                                               "Allergy to grass pollen"};

const std::array<const char*, 5> kCarePlans = {
    "Diabetes self management plan", "Hypertension lifestyle education", "Asthma self management",
    "Physical therapy procedure",    "Respiratory therapy"};

const std::array<const char*, 5> kProcedures = {
    "Documentation of current medications", "Medication reconciliation", "Spirometry",
    "Hemoglobin A1c measurement",           "Depression screening"};

const std::array<const char*, 4> kImmunizations = {
    "Influenza seasonal injectable preservative free", "Td (adult) preservative free",
    "Pneumococcal conjugate PCV 13", "Hep B adolescent or pediatric"};

/// Deterministic draws on top of mt19937_64, whose output sequence is fixed by
/// the standard (unlike the std distributions).
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  /// Inclusive range.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename Array>
  const char* pick(const Array& values) {
    return values[below(values.size())];
  }

  std::string uuid() {
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    for (int i = 0; i < 32; ++i) {
      if (i == 8 || i == 12 || i == 16 || i == 20) s += '-';
      s += hex[below(16)];
    }
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

std::string pad2(std::uint64_t v) { return (v < 10 ? "0" : "") + std::to_string(v); }

}  // namespace

DatasetManifest generate_synthetic(std::uint64_t seed, std::size_t n_patients,
                                   const std::filesystem::path& directory) {
  if (n_patients < 1) throw ValidationError("n_patients must be at least 1");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec || !std::filesystem::is_directory(directory)) {
    throw IoError("cannot create directory " + directory.string());
  }

  std::map<std::string, std::vector<csv::Row>> rows;
  Draws draw(seed);

  for (std::size_t p = 0; p < n_patients; ++p) {
    const std::string patient = draw.uuid();
    const double u = draw.unit();
    const char* race = u < 0.60 ? "white" : (u < 0.85 ? "black" : "asian");
    const char* gender = draw.below(2) == 0 ? "M" : "F";
    const auto year = draw.between(1930, 2015);
    const auto month = draw.between(1, 12);
    const auto day = draw.between(1, 28);
    rows["Patients"].push_back({patient, draw.pick(kBirthplaces), race, gender,
                                std::to_string(year) + "-" + pad2(month) + "-" + pad2(day)});

    std::vector<std::string> encounters;
    const auto n_enc = draw.between(1, 4);
    for (std::uint64_t i = 0; i < n_enc; ++i) {
      encounters.push_back(draw.uuid());
      const char* reason = draw.below(2) == 0 ? draw.pick(kConditions) : "";
      rows["Encounters"].push_back({encounters.back(), patient, draw.pick(kEncounterTypes), reason});
    }

    const auto n_med = draw.below(4);
    for (std::uint64_t i = 0; i < n_med; ++i) {
      const auto m = draw.below(synthetic_medications().size());
      const auto& enc = encounters[draw.below(encounters.size())];
      rows["Medications"].push_back(
          {draw.uuid(), patient, enc, synthetic_medications()[m], kMedicationReasons[m]});
    }

    auto simple = [&](const std::string& label, std::uint64_t max_count, const auto& values) {
      const auto n = draw.below(max_count + 1);
      for (std::uint64_t i = 0; i < n; ++i) {
        rows[label].push_back({draw.uuid(), patient, draw.pick(values)});
      }
    };
    simple("Allergies", 2, kAllergies);
    simple("Conditions", 2, kConditions);
    simple("CarePlans", 1, kCarePlans);
    simple("Procedures", 2, kProcedures);
    simple("Immunizations", 2, kImmunizations);
  }

  DatasetManifest manifest;
  manifest.directory = directory;
  manifest.seed = seed;
  for (const auto& entity : dataset_layout()) {
    const auto path = directory / entity.file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    csv::write_row(out, entity.columns);
    const auto& data = rows[entity.label];
    for (const auto& row : data) csv::write_row(out, row);
    if (!out) throw IoError("write failed for " + path.string());
    manifest.files[entity.label] = entity.file;
    manifest.row_counts[entity.label] = data.size();
  }
  return manifest;
}

}  // namespace nlds
