using System;
using System.Collections.Generic;

namespace Shop.Core
{
    public interface IPriced
    {
        decimal Price { get; }
    }

    [Serializable]
    public class Item : IPriced
    {
        public string Name { get; }
        public decimal Price { get; }

        public Item(string name, decimal price)
        {
            Name = name;
            Price = price;
        }

        public override string ToString() => $"{Name}: {Price}";
    }

    public class Inventory
    {
        private readonly List<Item> _items = new List<Item>();

        public void Add(Item item)
        {
            Validate(item);
            _items.Add(item);
        }

        public decimal Total()
        {
            decimal sum = 0;
            foreach (var it in _items)
            {
                sum += it.Price;
            }
            return Pricing.Round(sum);
        }

        private static void Validate(IPriced p)
        {
            if (p.Price < 0) throw new ArgumentException("negative");
        }
    }
}
