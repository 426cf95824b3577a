#pragma once

#include "citesem/classify.hpp"
#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"
#include "citesem/evaluate.hpp"
#include "citesem/experiment.hpp"
#include "citesem/featurizer.hpp"
#include "citesem/linalg.hpp"
#include "citesem/meaning_space.hpp"
#include "citesem/pca.hpp"
#include "citesem/supervised.hpp"
#include "citesem/synthetic.hpp"
#include "citesem/tfidf.hpp"
