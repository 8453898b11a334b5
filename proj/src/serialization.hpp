#pragma once

#include "amrkit/kmer.hpp"
#include "byte_io.hpp"

namespace amrkit::detail {

void write_vocabulary_block(ByteWriter& out, const KmerVocabulary& vocab);
KmerVocabulary read_vocabulary_block(ByteReader& in);

}  // namespace amrkit::detail
