#![allow(clippy::excessive_precision)]

// Upper-tail reference values computed with mpmath at 50 digits by
// tests/data/tail_references.py; regenerate with that script.

/// (x, df, chi2 survival)
pub const CHI2: [(f64, f64, f64); 30] = [
    (1.778, 1.0, 0.18239510681194778),
    (8.993, 2.0, 0.011147946148182496),
    (12.632, 3.0, 0.0055039432226453427),
    (9.054, 4.0, 0.059763819443930927),
    (7.447, 5.0, 0.18946149177913587),
    (4.919, 6.0, 0.55424326556196555),
    (21.947, 7.0, 0.0025944104180100103),
    (35.284, 9.0, 5.308692227451689e-5),
    (21.078, 10.0, 0.020556184309992048),
    (24.411, 12.0, 0.017874249446419475),
    (2.966, 15.0, 0.99962529056198994),
    (50.89, 20.0, 0.00016496627840788544),
    (68.997, 25.0, 5.4164978570282184e-6),
    (62.78, 30.0, 0.00041874747545362178),
    (122.506, 50.0, 5.0768522737688913e-8),
    (8.945, 1.0, 0.0027823009452429851),
    (8.288, 2.5, 0.026270434226312689),
    (7.202, 2.5, 0.043940557261973674),
    (25.473, 11.0, 0.0077682637507414222),
    (15.71, 40.0, 0.9997992544640928),
    (21.214, 17.0, 0.21686401517946901),
    (6.965, 0.5, 0.0028226223845003887),
    (6.2, 1.0, 0.012775031283087394),
    (5.884, 0.5, 0.0053732905177751507),
    (14.531, 3.0, 0.00226464561860031),
    (26.228, 8.0, 0.00095996887353581361),
    (6.225, 0.5, 0.0043785702209951702),
    (14.215, 2.0, 0.0008189397845108025),
    (27.259, 17.0, 0.054377045438634991),
    (4.592, 2.0, 0.1006606822389427),
];

/// (x, df1, df2, F survival)
pub const F: [(f64, f64, f64, f64); 30] = [
    (1.315, 2.0, 3.0, 0.38897285074630992),
    (5.049, 3.0, 30.0, 0.005972511607133273),
    (4.803, 4.0, 30.0, 0.0040908858009284594),
    (7.071, 8.0, 2.0, 0.12975462961240155),
    (2.826, 3.0, 3.0, 0.20813098733617124),
    (3.118, 5.0, 3.0, 0.18908372521507227),
    (6.378, 8.0, 3.0, 0.077627660692736065),
    (7.415, 2.0, 60.0, 0.001325150347585934),
    (2.513, 1.0, 5.0, 0.17376663870756541),
    (2.627, 2.0, 30.0, 0.088857239734955316),
    (4.114, 1.0, 5.0, 0.098324069812387891),
    (4.889, 10.0, 120.0, 6.5555443125631041e-6),
    (7.321, 2.0, 120.0, 0.0010000955985435187),
    (3.935, 1.0, 120.0, 0.049574179385756668),
    (6.327, 1.0, 60.0, 0.014587201561658003),
    (5.542, 1.0, 20.0, 0.028899433665443411),
    (7.329, 8.0, 60.0, 9.5661714905542872e-7),
    (3.261, 4.0, 60.0, 0.017389018647815641),
    (6.907, 5.0, 30.0, 0.00021375618108241862),
    (1.988, 2.0, 2.0, 0.33467202141900937),
    (7.81, 10.0, 30.0, 5.1954677315259652e-6),
    (0.232, 3.0, 2.0, 0.8688301482733803),
    (4.24, 1.0, 10.0, 0.066484461809176971),
    (4.963, 2.0, 2.0, 0.16770082173402649),
    (4.446, 8.0, 10.0, 0.015618487778130816),
    (7.501, 4.0, 20.0, 0.00073344978064473791),
    (0.701, 2.0, 120.0, 0.49810887052727499),
    (0.88, 8.0, 10.0, 0.563415239127272),
    (5.519, 8.0, 20.0, 0.00091640625118876568),
    (7.122, 8.0, 120.0, 1.1064013976148642e-7),
];

/// (t, df, two-tailed p)
pub const T: [(f64, f64, f64); 30] = [
    (-5.7, 30.0, 3.2334859002958005e-6),
    (5.098, 100.0, 1.6285312498076549e-6),
    (2.493, 7.0, 0.041414307602358291),
    (-3.506, 7.0, 0.0099126127231535746),
    (5.203, 2.0, 0.035011185766746641),
    (-3.671, 22.0, 0.0013408733009545931),
    (5.914, 10.0, 0.00014823666364944321),
    (4.163, 60.0, 0.00010190781065101082),
    (4.247, 3.0, 0.023915915771304706),
    (1.976, 1.0, 0.29825260584022979),
    (1.839, 1.0, 0.31706876238187637),
    (3.571, 3.0, 0.037525389318860866),
    (-1.144, 5.0, 0.30441918817969966),
    (3.92, 22.0, 0.00073290208733088853),
    (1.643, 15.0, 0.12117493438573907),
    (-2.019, 30.0, 0.052501743658913158),
    (-2.274, 4.0, 0.085349811611639676),
    (1.393, 15.0, 0.1839221038520603),
    (-2.98, 22.0, 0.0069071781320844008),
    (2.602, 60.0, 0.011657920872335767),
    (-1.002, 3.0, 0.3901760523299038),
    (0.958, 3.0, 0.40873625301208257),
    (5.386, 10.0, 0.00030746228927926186),
    (1.32, 22.0, 0.20040576056845513),
    (-2.865, 15.0, 0.011802709765925489),
    (-4.783, 100.0, 5.9616971031226845e-6),
    (5.747, 22.0, 8.8207046099749011e-6),
    (-0.892, 15.0, 0.38647880701102434),
    (1.361, 30.0, 0.18365050809774033),
    (4.874, 15.0, 0.00020235584163414874),
];
