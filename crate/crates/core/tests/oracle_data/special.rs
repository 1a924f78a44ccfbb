// Reference values computed with mpmath at 50 significant digits.
// (a, x, Q(a, x)) with Q the regularized upper incomplete gamma function.
pub const GAMMA_Q: &[(f64, f64, f64)] = &[
    (0.5, 0.005, 0.92034432544594203624),
    (0.5, 0.1, 0.65472084601857702044),
    (0.5, 0.3, 0.43857802608099986352),
    (0.5, 0.45, 0.34278171114791138661),
    (0.5, 0.5, 0.31731050786291410283),
    (0.5, 0.55, 0.29426610430496287091),
    (0.5, 0.75, 0.2206713619198467926),
    (0.5, 1.25, 0.11384629800665805028),
    (0.5, 2.5, 0.025347318677468263932),
    (1.0, 0.01, 0.99004983374916805337),
    (1.0, 0.2, 0.81873075307798184958),
    (1.0, 0.6, 0.54881163609402644481),
    (1.0, 0.9, 0.40656965974059910286),
    (1.0, 1.0, 0.3678794411714423216),
    (1.0, 1.1, 0.33287108369807952372),
    (1.0, 1.5, 0.22313016014842982893),
    (1.0, 2.5, 0.08208499862389879517),
    (1.0, 5.0, 0.0067379469990854670966),
    (1.5, 0.015, 0.99863039481880868207),
    (1.5, 0.30000000000000004, 0.89643237334191140008),
    (1.5, 0.8999999999999999, 0.61493493578253744869),
    (1.5, 1.35, 0.4402272943602310535),
    (1.5, 1.5, 0.39162517627108895548),
    (1.5, 1.6500000000000001, 0.34764264473227452779),
    (1.5, 2.25, 0.21229028736013333023),
    (1.5, 3.75, 0.057558451972636406967),
    (1.5, 7.5, 0.0018166489665723232336),
    (2.0, 0.02, 0.99980264677289040826),
    (2.0, 0.4, 0.93844806444989501509),
    (2.0, 1.2, 0.66262726620684462867),
    (2.0, 1.8, 0.46283688702044229402),
    (2.0, 2.0, 0.40600584970983807568),
    (2.0, 2.2, 0.35457010675946838337),
    (2.0, 3.0, 0.19914827347145577192),
    (2.0, 5.0, 0.04042768199451280258),
    (2.0, 10.0, 0.00049939922738733336689),
    (2.5, 0.025, 0.99997079046000104989),
    (2.5, 0.5, 0.96256577324729636896),
    (2.5, 1.5, 0.6999858358786275091),
    (2.5, 2.25, 0.47988343811329941617),
    (2.5, 2.5, 0.41588018699550792028),
    (2.5, 2.75, 0.35794588085095846052),
    (2.5, 3.75, 0.18602983360286701885),
    (2.5, 6.25, 0.028543123326167459495),
    (2.5, 12.5, 0.00013933379118562617389),
    (3.5, 0.035, 0.99999932891146769881),
    (3.5, 0.7000000000000001, 0.98557126444898815005),
    (3.5, 2.1, 0.75647473073770821382),
    (3.5, 3.15, 0.50518894075573248478),
    (3.5, 3.5, 0.42887985755305471947),
    (3.5, 3.8500000000000005, 0.35978933272612477536),
    (3.5, 5.25, 0.16196449307942816158),
    (3.5, 8.75, 0.014441547880306008669),
    (3.5, 17.5, 0.000011184430509074327078),
    (4.0, 0.04, 0.99999989669042228783),
    (4.0, 0.8, 0.9909201421998460146),
    (4.0, 2.4, 0.77872291103631694754),
    (4.0, 3.6, 0.5152161104661485076),
    (4.0, 4.0, 0.43347012036670893362),
    (4.0, 4.4, 0.35944777278876904662),
    (4.0, 6.0, 0.15120388277664786381),
    (4.0, 10.0, 0.010336050675925717866),
    (4.0, 20.0, 3.2037197804769983839e-6),
    (4.5, 0.045, 0.99999998398157908137),
    (4.5, 0.9, 0.99424994542029483726),
    (4.5, 2.6999999999999997, 0.79813906239536147582),
    (4.5, 4.05, 0.52410093673035435319),
    (4.5, 4.5, 0.4372741889138670641),
    (4.5, 4.95, 0.35864134122843818503),
    (4.5, 6.75, 0.14125582649327980187),
    (4.5, 11.25, 0.0074224494199437916792),
    (4.5, 22.5, 9.2266287105491686753e-7),
    (8.0, 0.08, 0.9999999999999612448),
    (8.0, 1.6, 0.99973955984706551411),
    (8.0, 4.8, 0.88666617064067063531),
    (8.0, 7.2, 0.56894123888215245399),
    (8.0, 8.0, 0.45296080948699448545),
    (8.0, 8.8, 0.34783440028489102782),
    (8.0, 12.0, 0.089504496840175839615),
    (8.0, 20.0, 0.00077859008250736303843),
    (8.0, 40.0, 1.6640095444296474798e-10),
    (16.0, 0.16, 1.0),
    (16.0, 3.2, 0.99999971068114554635),
    (16.0, 9.6, 0.96379759189446251951),
    (16.0, 14.4, 0.62930113454758182099),
    (16.0, 16.0, 0.4667448913877207497),
    (16.0, 17.6, 0.31911323619640077722),
    (16.0, 24.0, 0.034400094059574811338),
    (16.0, 40.0, 5.4639807112998635718e-6),
    (16.0, 80.0, 5.9564006026470668754e-19),
    (31.5, 0.315, 1.0),
    (31.5, 6.300000000000001, 0.99999999999925847291),
    (31.5, 18.9, 0.99506914898769068285),
    (31.5, 28.35, 0.69888108689703146214),
    (31.5, 31.5, 0.47630238333813013009),
    (31.5, 34.650000000000006, 0.27341448381384220069),
    (31.5, 47.25, 0.0062498585959333271746),
    (31.5, 78.75, 4.7293480433619380137e-10),
    (31.5, 157.5, 3.4734270000361909197e-35),
    (63.5, 0.635, 1.0),
    (63.5, 12.700000000000001, 1.0),
    (63.5, 38.1, 0.9998956295738478398),
    (63.5, 57.15, 0.78315468682555010646),
    (63.5, 63.5, 0.48331068145320748947),
    (63.5, 69.85000000000001, 0.20803324728607775703),
    (63.5, 95.25, 0.00022805895987572390384),
    (63.5, 158.75, 2.6190337941679013405e-18),
    (63.5, 317.5, 1.47424770759054457e-68),
    (127.5, 1.2750000000000001, 1.0),
    (127.5, 25.5, 1.0),
    (127.5, 76.5, 0.99999993728623067232),
    (127.5, 114.75, 0.87272736408064705178),
    (127.5, 127.5, 0.48822252177040634337),
    (127.5, 140.25, 0.13074814071055557564),
    (127.5, 191.25, 3.9407224213527262499e-7),
    (127.5, 318.75, 1.1132360673494873544e-34),
    (127.5, 637.5, 3.7431813100564554817e-135),
    (511.5, 5.115, 1.0),
    (511.5, 102.30000000000001, 1.0),
    (511.5, 306.9, 1.0),
    (511.5, 460.35, 0.99001436004726004432),
    (511.5, 511.5, 0.49412008986727303409),
    (511.5, 562.6500000000001, 0.013727670870579914501),
    (511.5, 767.25, 3.4861068080478820557e-23),
    (511.5, 1278.75, 2.5308061966775324625e-132),
    (511.5, 2557.5, 3.9878488388399440312e-534),
    (4095.5, 40.955, 1.0),
    (4095.5, 819.1, 1.0),
    (4095.5, 2457.2999999999997, 1.0),
    (4095.5, 3685.9500000000003, 0.99999999998216796505),
    (4095.5, 4095.5, 0.49792204597375231014),
    (4095.5, 4505.05, 2.7681692200390791817e-10),
    (4095.5, 6143.25, 8.920098709319872975e-171),
    (4095.5, 10238.75, 2.5250402502676435682e-1041),
    (4095.5, 5324.150000000001, 2.3724170816602094031e-69),
    (16383.5, 163.835, 1.0),
    (16383.5, 3276.7000000000003, 1.0),
    (16383.5, 9830.1, 1.0),
    (16383.5, 14745.15, 1.0),
    (16383.5, 16383.5, 0.49896107160630297968),
    (16383.5, 18021.850000000002, 1.3229005865817336969e-35),
    (16383.5, 24575.25, 1.4252668867693198437e-675),
    (16383.5, 40958.75, 1.1809988939420468933e-4156),
    (16383.5, 21298.55, 1.6905202171308071279e-270),
];
// (x, erfc(x))
pub const ERFC: &[(f64, f64)] = &[
    (-2.0, 1.9953222650189527342),
    (-1.8, 1.9890905016357307161),
    (-1.6, 1.9763483833446440155),
    (-1.4, 1.9522851197626487964),
    (-1.2, 1.9103139782296353684),
    (-1.0, 1.8427007929497148693),
    (-0.8, 1.7421009647076605126),
    (-0.6, 1.6038560908479259051),
    (-0.4, 1.4283923550466684765),
    (-0.2, 1.2227025892104784662),
    (0.0, 1.0),
    (0.2, 0.77729741078952153382),
    (0.4, 0.57160764495333152355),
    (0.6, 0.39614390915207409492),
    (0.8, 0.25789903529233948741),
    (1.0, 0.15729920705028513066),
    (1.2, 0.089686021770364631634),
    (1.4, 0.0477148802373512036),
    (1.6, 0.023651616655355984478),
    (1.8, 0.010909498364269283854),
    (2.0, 0.0046777349810472658379),
    (2.2, 0.0018628462979818898586),
    (2.4, 0.00068851389664507888555),
    (2.6, 0.00023603441652934908781),
    (2.8, 0.00007501319466545910313),
    (3.0, 0.000022090496998585441373),
    (3.2, 6.0257611517620878134e-6),
    (3.4, 1.5219933628622863179e-6),
    (3.6, 3.5586299300768506304e-7),
    (3.8, 7.7003927456964236041e-8),
    (4.0, 1.5417257900280018852e-8),
    (4.2, 2.8554941795921842402e-9),
    (4.4, 4.8917102706058727478e-10),
    (4.6, 7.7495995974418577945e-11),
    (4.8, 1.1352143584921980717e-11),
    (5.0, 1.5374597944280348502e-12),
    (5.2, 1.9249061099972323498e-13),
    (5.4, 2.2276786794677860964e-14),
    (5.6, 2.3828362845830279952e-15),
    (5.8, 2.3555893751564415729e-16),
    (6.0, 2.1519736712498913117e-17),
    (4.5, 1.9661604415428874763e-10),
    (5.5, 7.3578479179743980631e-15),
    (7.0, 4.1838256077794143986e-23),
    (9.0, 4.1370317465138102381e-37),
    (12.0, 1.3562611692059042128e-64),
];
