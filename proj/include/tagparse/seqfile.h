#ifndef TAGPARSE_SEQFILE_H_
#define TAGPARSE_SEQFILE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "tagparse/auxlabels.h"
#include "tagparse/encodings.h"
#include "tagparse/tagger.h"

namespace tagparse {

// Tab-separated label file:
//
//   # scheme=dynamic aux=n+1,dist
//   the<TAB>DT<TAB>r+2~NP~NONE<TAB>r-1<TAB>2
//   ...
//   <blank line between sentences>
//
// Columns are word, POS, label, then one column per auxiliary track.
struct SeqFile {
  Scheme scheme = Scheme::kRelative;
  std::vector<AuxSpec> aux;
  std::vector<TrainingSentence> sentences;
};

void write_seq(std::ostream& out, const SeqFile& file);
void write_seq_file(const std::string& path, const SeqFile& file);

// Throws DataError("<source>:<line>: ...") on a missing header, a wrong
// column count or a malformed label.
SeqFile read_seq(std::istream& in, const std::string& source);
SeqFile read_seq_file(const std::string& path);

// Two columns per line (word, POS), blank line between sentences.
std::vector<Sentence> read_tagged(std::istream& in, const std::string& source);
std::vector<Sentence> read_tagged_file(const std::string& path);

}  // namespace tagparse

#endif  // TAGPARSE_SEQFILE_H_
