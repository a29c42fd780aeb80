#pragma once

#include "qecw/tolerances.hpp"
#include "qecw/gf2.hpp"
#include "qecw/pauli.hpp"
#include "qecw/hilbert.hpp"
#include "qecw/channels.hpp"
#include "qecw/codes.hpp"
#include "qecw/analysis.hpp"
#include "qecw/fidelity.hpp"
#include "qecw/pipelines.hpp"
