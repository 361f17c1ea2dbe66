use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spdt_core::generator::{generate_network, ModelParams};
use spdt_core::model::io::{read_links, read_network, write_links, write_network, NetworkMeta};
use spdt_core::{ContactNetwork, TimeGrid};

fn small(seed: u64, n: u32) -> ContactNetwork {
    let mut p = ModelParams::defaults(n, TimeGrid::new(300, 1).unwrap(), seed);
    p.q = 0.02;
    generate_network(&p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn directory_round_trip_is_exact(seed in any::<u64>(), n in 2u32..60) {
        let net = small(seed, n);
        let dir = tempfile::tempdir().unwrap();
        write_network(&net, dir.path()).unwrap();
        let back = read_network(dir.path()).unwrap();
        prop_assert_eq!(&back, &net);
        back.validate().unwrap();
    }

    #[test]
    fn event_order_does_not_matter(seed in any::<u64>(), shuffle in any::<u64>()) {
        let net = small(seed, 40);
        let mut events: Vec<_> = net.links().map(|l| l.event()).collect();
        events.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let rebuilt = ContactNetwork::from_events(*net.grid(), net.delta(), net.node_count(), events).unwrap();
        prop_assert_eq!(rebuilt, net);
    }

    #[test]
    fn text_form_is_canonical(seed in any::<u64>()) {
        let net = small(seed, 30);
        let mut a = Vec::new();
        write_links(&net, &mut a).unwrap();
        let back = read_links(a.as_slice(), &NetworkMeta::of(&net)).unwrap();
        let mut b = Vec::new();
        write_links(&back, &mut b).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generation_is_a_function_of_the_seed(seed in any::<u64>()) {
        prop_assert_eq!(small(seed, 25), small(seed, 25));
    }
}
