#![allow(clippy::excessive_precision)]

//! Mittag-Leffler values against a frozen high-precision table (40 digits,
//! Talbot inversion of s^{α−β}/(s^α − z) cross-checked against the power
//! series wherever the series is well conditioned).

use absubdiff_core::mlf::{ml_eval, MlParams};

const TABLE: &[(f64, f64, f64, f64)] = &[
    (0.1, 0.1, -0.8, 0.031160351197110488148),
    (0.1, 0.1, -3.0, 0.0060745407799221391676),
    (0.1, 0.1, -7.5, 0.0013195352848398861178),
    (0.1, 0.1, -15.0, 0.00036923647067064131766),
    (0.1, 0.1, -30.0, 0.000097887565462365510376),
    (0.1, 1.0, -0.8, 0.54147925687299134337),
    (0.1, 1.0, -3.0, 0.2385593497825385582),
    (0.1, 1.0, -7.5, 0.11113584133257473954),
    (0.1, 1.0, -15.0, 0.058783452847323404884),
    (0.1, 1.0, -30.0, 0.030265975870874652001),
    (0.1, 2.0, -0.8, 0.56608124706742910212),
    (0.1, 2.0, -3.0, 0.25771343574638135476),
    (0.1, 2.0, -7.5, 0.12184334128244983473),
    (0.1, 2.0, -15.0, 0.064850444028624192802),
    (0.1, 2.0, -30.0, 0.033504927318870497006),
    (0.25, 0.25, -0.8, 0.079974756559815525964),
    (0.25, 0.25, -3.0, 0.014567819940323703349),
    (0.25, 0.25, -7.5, 0.0030224423598593851178),
    (0.25, 0.25, -15.0, 0.00082720350741218083074),
    (0.25, 0.25, -30.0, 0.00021648735946473948726),
    (0.25, 1.0, -0.8, 0.52101671963882239595),
    (0.25, 1.0, -3.0, 0.21900442756040679925),
    (0.25, 1.0, -7.5, 0.099423109139293559615),
    (0.25, 1.0, -15.0, 0.051977231408360184762),
    (0.25, 1.0, -30.0, 0.026584961365091656998),
    (0.25, 2.0, -0.8, 0.58240620811876224697),
    (0.25, 2.0, -3.0, 0.26853261339754040402),
    (0.25, 2.0, -7.5, 0.12734580719808661098),
    (0.25, 2.0, -15.0, 0.067830831216729165526),
    (0.25, 2.0, -30.0, 0.035054746940311723718),
    (0.5, 0.5, -0.8, 0.17290911216926450855),
    (0.5, 0.5, -3.0, 0.02718613000358643569),
    (0.5, 0.5, -7.5, 0.0048868855761811644096),
    (0.5, 0.5, -15.0, 0.0012454877201698007572),
    (0.5, 0.5, -30.0, 0.00031291770525374203432),
    (0.5, 1.0, -0.8, 0.489100589223114723),
    (0.5, 1.0, -3.0, 0.17900115118138995042),
    (0.5, 1.0, -7.5, 0.074573693062876683005),
    (0.5, 1.0, -15.0, 0.037529606388505765746),
    (0.5, 1.0, -30.0, 0.018795888861416751497),
    (0.5, 2.0, -0.8, 0.61219362953050747205),
    (0.5, 2.0, -3.0, 0.28490429471865863023),
    (0.5, 2.0, -7.5, 0.133998532378297262),
    (0.5, 2.0, -15.0, 0.070947631612538641663),
    (0.5, 2.0, -30.0, 0.036522412113029771076),
    (0.7, 0.7, -0.8, 0.26586409264672660389),
    (0.7, 0.7, -3.0, 0.035901729730841233827),
    (0.7, 0.7, -7.5, 0.0050598474200785213971),
    (0.7, 0.7, -15.0, 0.0011541395031173379551),
    (0.7, 0.7, -30.0, 0.0002741428200864544974),
    (0.7, 1.0, -0.8, 0.46727114652845443885),
    (0.7, 1.0, -3.0, 0.13789710966502707183),
    (0.7, 1.0, -7.5, 0.049440801830311776805),
    (0.7, 1.0, -15.0, 0.023501440278040012771),
    (0.7, 1.0, -30.0, 0.011444251527526971691),
    (0.7, 2.0, -0.8, 0.63957903073709699345),
    (0.7, 2.0, -3.0, 0.29707295970746545998),
    (0.7, 2.0, -7.5, 0.13648055284694370064),
    (0.7, 2.0, -15.0, 0.071274674921895160118),
    (0.7, 2.0, -30.0, 0.036392067608973166303),
    (0.9, 0.9, -0.8, 0.38241104875847746571),
    (0.9, 0.9, -3.0, 0.0441512717830377251),
    (0.9, 0.9, -7.5, 0.0030855812383730366781),
    (0.9, 0.9, -15.0, 0.00054199570979589930344),
    (0.9, 0.9, -30.0, 0.00011825044794307209151),
    (0.9, 1.0, -0.8, 0.4524768423443344651),
    (0.9, 1.0, -3.0, 0.08388835403377326904),
    (0.9, 1.0, -7.5, 0.018662932471857279635),
    (0.9, 1.0, -15.0, 0.0079286024323444488278),
    (0.9, 1.0, -30.0, 0.0037137076984598529581),
    (0.9, 2.0, -0.8, 0.67103493335630342076),
    (0.9, 2.0, -3.0, 0.30957669519125859609),
    (0.9, 2.0, -7.5, 0.13551967466682556911),
    (0.9, 2.0, -15.0, 0.069028077051786624393),
    (0.9, 2.0, -30.0, 0.03478662367075550814),
    (0.99, 0.99, -0.8, 0.44243046241161652202),
    (0.99, 0.99, -3.0, 0.049100971877477643486),
    (0.99, 0.99, -7.5, 0.00087990262814404771976),
    (0.99, 0.99, -15.0, 0.000061719048910468290216),
    (0.99, 0.99, -30.0, 0.000012777095829753515026),
    (0.99, 1.0, -0.8, 0.44948632792467493486),
    (0.99, 1.0, -3.0, 0.05345186750619962362),
    (0.99, 1.0, -7.5, 0.0024664680868175315007),
    (0.99, 1.0, -15.0, 0.00078316696851676135818),
    (0.99, 1.0, -30.0, 0.0003597560516821720766),
    (0.99, 2.0, -0.8, 0.68656408237678634169),
    (0.99, 2.0, -3.0, 0.31597085382224540186),
    (0.99, 2.0, -7.5, 0.13355236004592427679),
    (0.99, 2.0, -15.0, 0.066946339185546026726),
    (0.99, 2.0, -30.0, 0.033499873468884080308),
    (1.5, 1.0, -4.0, -0.27242487890994054146),
    (1.5, 2.0, -9.0, 0.058825880209303689455),
    (1.3, 0.7, -12.0, -0.014102754958405077449),
    (1.8, 1.2, -20.0, 0.032669394687787465713),
    (0.6, 3.5, -6.0, 0.071755547867938431133),
    (0.4, 0.3, -25.0, -0.0032985454673350306013),
    (1.2, 1.0, 3.0, 10.167754810327472833),
    (0.5, 1.0, 4.5, 1245928884.274406163),
    (0.8, 2.0, 5.0, 295.09501048633654409),
];

#[test]
fn matches_reference_table() {
    let mut worst = (0.0f64, (0.0, 0.0, 0.0));
    for &(a, b, z, want) in TABLE {
        let got = ml_eval(MlParams::new(a, b).unwrap(), z).unwrap();
        let rel = ((got - want) / want).abs();
        if rel > worst.0 {
            worst = (rel, (a, b, z));
        }
        assert!(
            rel < 1e-10,
            "E_{{{a},{b}}}({z}) = {got}, want {want} (rel {rel:e})"
        );
    }
    println!("worst relative error {:e} at {:?}", worst.0, worst.1);
}
