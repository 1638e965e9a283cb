#pragma once

#include "nems/circuit_params.hpp"
#include "nems/classical_circuit.hpp"
#include "nems/config.hpp"
#include "nems/csv.hpp"
#include "nems/entanglement.hpp"
#include "nems/error.hpp"
#include "nems/fock.hpp"
#include "nems/readout.hpp"
#include "nems/spectral.hpp"
