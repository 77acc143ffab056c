#pragma once

#include "capacity.hpp"
#include "compacted_trie.hpp"
#include "det_dictionary.hpp"
#include "dynamic_index.hpp"
#include "dynamic_predecessor.hpp"
#include "error.hpp"
#include "index_io.hpp"
#include "probes.hpp"
#include "static_index.hpp"
#include "static_predecessor.hpp"
#include "suffix_array.hpp"
#include "suffix_oracle.hpp"
#include "text.hpp"
#include "wexp_tree.hpp"
