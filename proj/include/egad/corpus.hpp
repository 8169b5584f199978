#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Character-level corpus ingestion. Tokenizer ids follow first appearance
// in the file; id 0 is reserved for padding and never emitted. The byte
// stream is UTF-8 validated and chunked to max_seq_len tokens; a shorter
// final chunk is kept when it still holds an input/target pair. The 95/5
// train/validation split shuffles with a fixed internal seed so the same
// file always yields the same datasets regardless of the run seed.

namespace egad {

struct Corpus {
    std::vector<uint32_t> vocab_chars;         // id -> code point; [0] is the pad slot
    std::map<uint32_t, int> char_to_id;
    std::vector<std::vector<int>> sequences;   // chunks, each 2..max_seq_len tokens
    std::vector<int> train_idx;                // ascending indices into sequences
    std::vector<int> val_idx;

    int vocab_size() const { return int(vocab_chars.size()); }
    std::vector<std::vector<int>> train_sequences() const;
    std::vector<std::vector<int>> val_sequences() const;
};

Corpus ingest_text(const std::string& text, int max_seq_len);
Corpus ingest_corpus(const std::string& path, int max_seq_len);

} // namespace egad
