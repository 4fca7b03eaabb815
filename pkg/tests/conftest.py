"""Shared fixtures: the frozen 14-study air-pollution counts corpus."""

import pytest

from metaudit.searchspace import StudyCounts

# (study_id, outcomes, predictors, lags, covariates, space1, space2, space3)
CORPUS_ROWS = [
    ("12 Barnett", 7, 4, 1, 13, 28, 8192, 229376),
    ("13 Zanobetti", 2, 6, 2, 7, 24, 128, 3072),
    ("14 Zanobetti", 5, 19, 1, 5, 95, 32, 3040),
    ("15 Peters", 2, 6, 13, 12, 156, 4096, 638976),
    ("20 Lanki", 2, 5, 4, 5, 40, 32, 1280),
    ("21 Cendon", 2, 5, 1, 6, 10, 64, 640),
    ("40 Koken", 5, 6, 10, 5, 300, 32, 9600),
    ("41 Linn", 10, 4, 2, 8, 80, 256, 20480),
    ("42 Mann", 21, 4, 7, 9, 588, 512, 301056),
    ("43 Peters", 1, 7, 2, 5, 14, 32, 448),
    ("44 Pope", 1, 2, 7, 9, 14, 512, 7168),
    ("45 Sullivan", 4, 4, 3, 10, 48, 1024, 49152),
    ("46 Ye", 8, 5, 5, 5, 200, 32, 6400),
    ("47 Zanobetti", 5, 2, 4, 7, 40, 128, 5120),
]

CORPUS_NAMES = {
    "12 Barnett": [
        "Age", "Sex", "Region", "T", "T-1", "RH", "AP", "DOW",
        "HotDays", "ColdDays", "HD", "HD-1", "Rain",
    ],
    "13 Zanobetti": ["Age", "Sex", "T", "AT", "RH", "DOW", "season"],
    "14 Zanobetti": ["T", "DPT", "Trend", "Season", "Year"],
    "15 Peters": [
        "Age", "Sex", "T", "Occupational status", "Educational status",
        "Smoking status", "Hospital location", "DOW", "HOD", "Season",
        "Location", "Symptoms of MI",
    ],
    "20 Lanki": ["Age", "Sex", "T", "Season", "Case fatality"],
    "21 Cendon": ["mT", "mT-1", "RH", "RH-1", "DOW", "Trend"],
    "40 Koken": ["Age", "Sex", "T", "DPT", "DOW"],
    "41 Linn": ["Age", "Sex", "T", "RH", "AP", "Race", "Region", "Season"],
    "42 Mann": [
        "Age", "Sex", "mT", "RH", "DOW", "Year", "Trend", "Region",
        "Day of Study",
    ],
    "43 Peters": ["Age", "Sex", "mT", "RH", "MH"],
    "44 Pope": [
        "Age", "Sex", "T", "DPT", "Smoking status", "BMI", "Region",
        "MH", "Clearing index",
    ],
    "45 Sullivan": [
        "Age", "Sex", "T", "RH", "DOW", "Race", "BMI", "Smoking status",
        "MH", "Season",
    ],
    "46 Ye": ["Age", "Sex", "MT", "mT", "Trend"],
    "47 Zanobetti": ["Age", "Sex", "AT", "AT-1", "DOW", "Season", "Region"],
}

# Five-number summaries of the corpus search spaces, in the order
# (minimum, lower quartile, median, upper quartile, maximum).
CORPUS_SUMMARY = {
    "space1": (10.0, 21.5, 44.0, 167.0, 588.0),
    "space2": (32.0, 32.0, 128.0, 640.0, 8192.0),
    "space3": (448.0, 2600.0, 6784.0, 94208.0, 638976.0),
}


@pytest.fixture
def corpus_studies():
    return [
        StudyCounts(
            study_id=row[0],
            outcomes=row[1],
            predictors=row[2],
            lags=row[3],
            covariates=row[4],
            covariate_names=CORPUS_NAMES[row[0]],
        )
        for row in CORPUS_ROWS
    ]
