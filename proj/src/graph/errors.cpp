#include "nlds/errors.hpp"

namespace nlds {

std::string error_kind(const std::exception& e) {
#define NLDS_KIND(Name) \
  if (dynamic_cast<const Name*>(&e)) return #Name
  NLDS_KIND(ParseError);
  NLDS_KIND(CypherSubsetError);
  NLDS_KIND(ExecutionError);
  NLDS_KIND(IngestError);
  NLDS_KIND(IoError);
  NLDS_KIND(SchemaConflict);
  NLDS_KIND(VocabularyError);
  NLDS_KIND(KeywordError);
  NLDS_KIND(GenerationError);
  NLDS_KIND(ViewNotFound);
  NLDS_KIND(ViewExists);
  NLDS_KIND(ViewDefinitionError);
  NLDS_KIND(SessionNotFound);
  NLDS_KIND(CandidateNotFound);
  NLDS_KIND(ValidationError);
#undef NLDS_KIND
  return "Error";
}

}  // namespace nlds
