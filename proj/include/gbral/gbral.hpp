#pragma once

#include "gbral/guard.hpp"
#include "gbral/data_word.hpp"
#include "gbral/solver.hpp"
#include "gbral/automaton.hpp"
#include "gbral/automaton_io.hpp"
#include "gbral/equivalence_check.hpp"
#include "gbral/sut.hpp"
#include "gbral/sdt.hpp"
#include "gbral/tainted_tree_oracle.hpp"
#include "gbral/blackbox_tree_oracle.hpp"
#include "gbral/equivalence_oracles.hpp"
#include "gbral/learner.hpp"
#include "gbral/experiment.hpp"
